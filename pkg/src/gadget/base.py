"""
Base Gadget - Buffer page plus chained hash table, used once t <= t_min
"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional

from ..hashing import HashedKey
from ..io_model import PagedArray, PagedMemory, PageCache, Record, RecordCodec
from ..utils.errors import BadParameters, NeedsRebuild
from .params import GadgetElement, GadgetLedger, GadgetParams, QueryTrace

logger = logging.getLogger(__name__)


def table_size(params: GadgetParams) -> int:
    """Number of table buckets P: enough pages for the nominal load, at most one per page-hash value"""
    pages = -(-params.nominal_capacity * params.elem_bits // params.b)
    return min(params.b, max(1, pages))


class BaseGadget:
    """
    Small gadget: inserts append to one buffer page. A batch that would fill
    it is spread over the table by p mod P together with the held records, so
    each touched bucket chain is extended once per batch.
    """

    def __init__(self, params: GadgetParams, mem: PagedMemory, ledger: Optional[GadgetLedger] = None):
        if not params.is_base:
            raise BadParameters(f"t={params.t} is above t_min={params.t_min}; use a recursive gadget")
        if params.b != mem.page_bits:
            raise BadParameters(f"gadget b={params.b} does not match {mem.page_bits}-bit pages")

        self.params = params
        self.mem = mem
        self.ledger = ledger if ledger is not None else GadgetLedger()
        self.codec = RecordCodec(params.widths, params.b)
        self.table_size = table_size(params)

        self.buffer = PagedArray(mem, self.codec)
        self.table: Dict[int, PagedArray] = {}
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def __repr__(self) -> str:
        return f"BaseGadget(t={self.params.t}, count={self._count}, buckets={len(self.table)}/{self.table_size})"

    def bulk_insert(self, elements: Iterable[Record]):
        """
        Append elements to the buffer page, or spread buffer and elements over the table in one pass

        Raises:
            NeedsRebuild: The gadget would exceed its capacity
        """
        elements = list(elements)
        if not elements:
            return
        params = self.params
        if self._count + len(elements) > params.capacity:
            raise NeedsRebuild(f"base gadget t={params.t} holds {self._count}/{params.capacity}, "
                               f"cannot take {len(elements)} more")

        level = self.ledger.level(params.t)
        level.elements_written += len(elements)
        level.bits_written += len(elements) * params.elem_bits

        if len(self.buffer) + len(elements) < self.buffer.per_page:
            self.buffer.extend(elements)
        else:
            held = self.buffer.read_all() if len(self.buffer) else []
            self.buffer.truncate()
            self._spread(held + elements)
        self._count += len(elements)

    def _spread(self, records: List[Record]):
        buckets = defaultdict(list)
        for record in records:
            buckets[record[0] % self.table_size].append(record)
        for slot in sorted(buckets):
            chain = self.table.get(slot)
            if chain is None:
                chain = self.table[slot] = PagedArray(self.mem, self.codec)
            chain.extend(buckets[slot])
        self.ledger.level(self.params.t).base_flushes += 1

    def query(self, x: HashedKey, trace: Optional[QueryTrace] = None,
              cache: Optional[PageCache] = None) -> List[int]:
        """
        Backpointers of every element whose key equals x, ascending

        Reads the buffer page and the chain of bucket x.p mod P.
        """
        if trace is not None:
            trace.visits += 1

        p, d, s = x
        pages_read = 0
        hits = []
        if len(self.buffer):
            pages_read += 1
            hits.extend(r[3] for r in self.buffer.read_block(0) if r[0] == p and r[1] == d and r[2] == s)

        chain = self.table.get(p % self.table_size)
        if chain is not None:
            for page_no in range(chain.page_count):
                pages_read += 1
                hits.extend(r[3] for r in chain.read_block(page_no) if r[0] == p and r[1] == d and r[2] == s)

        self.ledger.level(self.params.t).base_query_pages[pages_read] += 1
        hits.sort()
        return hits

    def elements(self) -> List[GadgetElement]:
        """Every stored element (uncounted)"""
        records = self.buffer.peek_all()
        for slot in sorted(self.table):
            records.extend(self.table[slot].peek_all())
        return [GadgetElement(*r) for r in records]

    def page_count(self) -> int:
        return len(self.buffer.page_ids) + sum(len(chain.page_ids) for chain in self.table.values())

    def level_elements(self) -> Dict[int, int]:
        return {self.params.t: self._count}

    def destroy(self):
        """Free every page and return to the empty state"""
        self.buffer.clear()
        for chain in self.table.values():
            chain.clear()
        self.table = {}
        self._count = 0
