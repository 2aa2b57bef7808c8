"""
Recursive Gadget - Compressed multiset of hashed keys with bulk insert and query

A t-gadget keeps every element, uncompressed, in an append-only log of blocks.
Each filled block is top-compressed to (p, high(d), high(s), block) and
bulk-inserted into a sqrt(t)-gadget, the top. Once the top holds b*sqrt(t)
elements, the blocks it covers are re-read from the log, bucketed by high(d)
and bottom-compressed to (p, low(d), low(s), block) into bottom gadget
high(d); the top is then destroyed. A query inspects the tail block, the top
and one bottom, and verifies every reported block against the log.
"""

import logging
from collections import Counter, defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

from ..hashing import HashedKey
from ..io_model import PagedArray, PagedMemory, PageCache, Record, RecordCodec
from ..utils.errors import BadParameters, NeedsRebuild
from .base import BaseGadget
from .params import GadgetElement, GadgetLedger, GadgetParams, QueryTrace

logger = logging.getLogger(__name__)

Gadget = Union['RecursiveGadget', BaseGadget]


class RecursiveGadget:
    """t-gadget for t > t_min: log, lazily created top and bottom sqrt(t)-gadgets"""

    def __init__(self, params: GadgetParams, mem: PagedMemory, ledger: Optional[GadgetLedger] = None):
        if params.is_base:
            raise BadParameters(f"t={params.t} is at or below t_min={params.t_min}; use a base gadget")
        if params.b != mem.page_bits:
            raise BadParameters(f"gadget b={params.b} does not match {mem.page_bits}-bit pages")

        self.params = params
        self.mem = mem
        self.ledger = ledger if ledger is not None else GadgetLedger()
        self.child_params = params.child()

        self.log = PagedArray(mem, RecordCodec(params.widths, params.b))
        self.top: Optional[Gadget] = None
        self.bottoms: Dict[int, Gadget] = {}
        self.top_count = 0
        self.flushed_lo = 0
        self.flushed_hi = 0

        half = params.half_bits
        self._half = half
        self._mask = (1 << half) - 1

    def __len__(self) -> int:
        return len(self.log)

    def __repr__(self) -> str:
        return (f"RecursiveGadget(t={self.params.t}, count={len(self.log)}, top_count={self.top_count}, "
                f"flushed=[{self.flushed_lo}, {self.flushed_hi}), bottoms={len(self.bottoms)})")

    @property
    def flushed_range(self) -> Tuple[int, int]:
        """Log blocks [lo, hi) currently represented in the top gadget"""
        return self.flushed_lo, self.flushed_hi

    def _spawn(self) -> Gadget:
        return new_gadget(self.child_params, self.mem, self.ledger)

    def _top(self) -> Gadget:
        if self.top is None:
            self.top = self._spawn()
        return self.top

    def _bottom(self, high_d: int) -> Gadget:
        bottom = self.bottoms.get(high_d)
        if bottom is None:
            bottom = self.bottoms[high_d] = self._spawn()
        return bottom

    def bulk_insert(self, elements: Iterable[Record]):
        """
        Append elements to the log and run the little and big flushes they trigger

        Args:
            elements: (p, d, s, backpointer) tuples at this gadget's (b, t)

        Raises:
            NeedsRebuild: The gadget, or one of its children, would exceed its capacity
        """
        elements = list(elements)
        if not elements:
            return
        params = self.params
        if len(self.log) + len(elements) > params.capacity:
            raise NeedsRebuild(f"gadget t={params.t} holds {len(self.log)}/{params.capacity}, "
                               f"cannot take {len(elements)} more")

        level = self.ledger.level(params.t)
        level.elements_written += len(elements)
        level.bits_written += len(elements) * params.elem_bits

        completed = self.log.extend(elements)
        if completed:
            self._little_flush(completed)

    def _little_flush(self, completed: List[Tuple[int, List[Record]]]):
        """Top-compress filled blocks into the top, big-flushing whenever it fills"""
        half = self._half
        top_capacity = self.params.top_capacity
        level = self.ledger.level(self.params.t)
        # filled blocks are still in cache
        cache: PageCache = {self.log.page_id(page_no): records for page_no, records in completed}

        batch = []
        for page_no, records in completed:
            level.little_flushes += 1
            batch.extend((p, d >> half, s >> half, page_no) for p, d, s, _ in records)
            self.flushed_hi = page_no + 1
            if self.top_count + len(batch) >= top_capacity:
                self._top().bulk_insert(batch)
                self.top_count += len(batch)
                batch = []
                self._big_flush(cache)
        if batch:
            self._top().bulk_insert(batch)
            self.top_count += len(batch)

    def _big_flush(self, cache: PageCache):
        """Move blocks [lo, hi) from the top into the bottom gadgets"""
        half, mask = self._half, self._mask
        lo, hi = self.flushed_lo, self.flushed_hi

        buckets = defaultdict(list)
        for block in range(lo, hi):
            for p, d, s, _ in self.log.read_block(block, cache):
                buckets[d >> half].append((p, d & mask, s & mask, block))
        for high_d in sorted(buckets):
            self._bottom(high_d).bulk_insert(buckets[high_d])

        if self.top is not None:
            self.top.destroy()
        self.top = None
        self.top_count = 0
        self.flushed_lo = hi
        self.ledger.level(self.params.t).big_flushes += 1
        logger.debug(f"Big flush t={self.params.t}: blocks [{lo}, {hi}) into {len(buckets)} bottoms")

    def query(self, x: HashedKey, trace: Optional[QueryTrace] = None,
              cache: Optional[PageCache] = None) -> List[int]:
        """
        Backpointers of every log occurrence whose full key equals x

        Args:
            x: (p, d, s) at this gadget's (b, t)
            trace: Per-query counters, updated in place
            cache: Op-local page cache shared by the whole recursion

        Returns:
            Backpointers in ascending log position
        """
        trace = trace if trace is not None else QueryTrace()
        cache = cache if cache is not None else {}
        trace.visits += 1

        p, d, s = x
        half, mask = self._half, self._mask
        high_d, high_s = d >> half, s >> half
        low_d, low_s = d & mask, s & mask
        found: List[Tuple[int, int, int]] = []

        count = len(self.log)
        epb = self.log.per_page
        if count % epb:
            tail = count // epb
            for pos, r in enumerate(self.log.read_block(tail, cache)):
                if r[0] == p and r[1] == d and r[2] == s:
                    found.append((tail, pos, r[3]))

        # absent children count as empty visits and are not created
        if self.top is None:
            trace.visits += self.child_params.query_visits
        else:
            top_hits = self.top.query(HashedKey(p, high_d, high_s), trace, cache)
            self._verify(top_hits, x, cache, trace, found,
                         lambda r: r[0] == p and r[1] >> half == high_d and r[2] >> half == high_s)

        bottom = self.bottoms.get(high_d)
        if bottom is None:
            trace.visits += self.child_params.query_visits
        else:
            bottom_hits = bottom.query(HashedKey(p, low_d, low_s), trace, cache)
            self._verify(bottom_hits, x, cache, trace, found,
                         lambda r: (r[0] == p and r[1] >> half == high_d
                                    and r[1] & mask == low_d and r[2] & mask == low_s))

        found.sort()
        return [backpointer for _, _, backpointer in found]

    def _verify(self, hits: List[int], x: HashedKey, cache: PageCache, trace: QueryTrace,
                found: List[Tuple[int, int, int]], compressed_match: Callable[[Record], bool]):
        """Dereference reported blocks and keep the full-key matches"""
        if not hits:
            return
        p, d, s = x
        false_positives = 0
        violations = 0
        for block, reported in sorted(Counter(hits).items()):
            records = self.log.read_block(block, cache)
            compressed = [(pos, r) for pos, r in enumerate(records) if compressed_match(r)]
            full = [(pos, r) for pos, r in compressed if r[1] == d and r[2] == s]
            violations += max(0, reported - len(compressed))
            false_positives += len(compressed) - len(full)
            found.extend((block, pos, r[3]) for pos, r in full)

        if false_positives or violations:
            level = self.ledger.level(self.params.t)
            level.false_positives += false_positives
            level.distribution_violations += violations
            trace.false_positives += false_positives
            trace.distribution_violations += violations

    def elements(self) -> List[GadgetElement]:
        """Every element in the log (uncounted)"""
        return [GadgetElement(*r) for r in self.log.peek_all()]

    def children(self) -> List[Gadget]:
        kids = [self.top] if self.top is not None else []
        return kids + [self.bottoms[k] for k in sorted(self.bottoms)]

    def page_count(self) -> int:
        return len(self.log.page_ids) + sum(child.page_count() for child in self.children())

    def level_elements(self) -> Dict[int, int]:
        counts = {self.params.t: len(self.log)}
        for child in self.children():
            for t, n in child.level_elements().items():
                counts[t] = counts.get(t, 0) + n
        return counts

    def destroy(self):
        """Free every page of the gadget and its children"""
        for child in self.children():
            child.destroy()
        self.log.clear()
        self.top = None
        self.bottoms = {}
        self.top_count = 0
        self.flushed_lo = 0
        self.flushed_hi = 0


def new_gadget(params: GadgetParams, mem: PagedMemory, ledger: Optional[GadgetLedger] = None) -> Gadget:
    """
    Create an empty gadget; children are created on first use

    Args:
        params: Gadget shape
        mem: Paged memory to allocate from
        ledger: Per-level counters to share (a fresh one if None)

    Returns:
        BaseGadget when t <= t_min, else RecursiveGadget
    """
    if params.is_base:
        return BaseGadget(params, mem, ledger)
    return RecursiveGadget(params, mem, ledger)
