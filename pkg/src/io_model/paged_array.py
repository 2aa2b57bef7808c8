"""
Paged Array - Append-only array of packed records stored in PagedMemory

The shared storage primitive: gadget logs, base-gadget buffers and tables,
node pending arrays and the global log are all PagedArrays. Only the last page
may be partially full (the tail). In cached-tail mode the tail lives in cache
and is written back when it fills or on sync().
"""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

from .packing import Record, RecordCodec
from .paged_memory import PagedMemory, PageId

logger = logging.getLogger(__name__)

PageCache = Dict[PageId, List[Record]]


class PagedArray:
    """Packed fixed-width records, per_page to a page, in insertion order"""

    def __init__(self, mem: PagedMemory, codec: RecordCodec, cached_tail: bool = False):
        """
        Initialize an empty array (no pages are allocated until data arrives)

        Args:
            mem: Backing paged memory
            codec: Record layout
            cached_tail: Keep the partially filled tail page in cache between calls
        """
        if codec.page_bits != mem.page_bits:
            raise ValueError(f"codec is for {codec.page_bits}-bit pages, memory has {mem.page_bits}")
        self.mem = mem
        self.codec = codec
        self.per_page = codec.per_page
        self.cached_tail = cached_tail

        self._page_ids: List[PageId] = []
        self._count = 0
        self._tail: Optional[List[Record]] = [] if cached_tail else None

    @classmethod
    def attach(cls, mem: PagedMemory, codec: RecordCodec, page_ids: List[PageId], count: int) -> 'PagedArray':
        """View existing pages (for example from a loaded page file) as an array of `count` records"""
        array = cls(mem, codec)
        if -(-count // codec.per_page) != len(page_ids):
            raise ValueError(f"{count} records need {-(-count // codec.per_page)} pages, got {len(page_ids)}")
        array._page_ids = list(page_ids)
        array._count = count
        return array

    def __len__(self) -> int:
        return self._count

    def __repr__(self) -> str:
        return f"PagedArray(count={self._count}, pages={self.page_count}, per_page={self.per_page})"

    @property
    def page_count(self) -> int:
        """Pages holding data"""
        return -(-self._count // self.per_page)

    @property
    def page_ids(self) -> List[PageId]:
        """Allocated page ids (the cached tail page may not be materialized yet)"""
        return list(self._page_ids)

    def page_id(self, page_no: int) -> PageId:
        return self._page_ids[page_no]

    def _tail_is_partial(self) -> bool:
        return self._count % self.per_page != 0

    def _store(self, page_no: int, records: List[Record]):
        if page_no < len(self._page_ids):
            page_id = self._page_ids[page_no]
        else:
            page_id = self.mem.alloc_page()
            self._page_ids.append(page_id)
        self.mem.write_page(page_id, self.codec.pack(records))

    def _load_tail(self) -> List[Record]:
        if self._tail is not None:
            return list(self._tail)
        page_no = self._count // self.per_page
        image = self.mem.read_page(self._page_ids[page_no])
        return self.codec.unpack(image, self._count % self.per_page)

    def extend(self, records: Iterable[Record]) -> List[Tuple[int, List[Record]]]:
        """
        Append records

        Args:
            records: Records to append, in order

        Returns:
            (page number, records) for every page that became full, in order.
            Their contents are in cache, so callers can use them at no I/O cost.
        """
        records = list(records)
        if not records:
            return []

        per_page = self.per_page
        page_no = self._count // per_page
        current = self._load_tail() if self._tail_is_partial() else []
        completed = []

        pos = 0
        while pos < len(records):
            room = per_page - len(current)
            current.extend(records[pos:pos + room])
            pos += room
            if len(current) == per_page:
                self._store(page_no, current)
                completed.append((page_no, current))
                page_no += 1
                current = []

        self._count += len(records)

        if self.cached_tail:
            self._tail = current
        else:
            if current:
                self._store(page_no, current)
            self._tail = None

        return completed

    def append(self, record: Record) -> int:
        """Append one record and return its index"""
        self.extend([record])
        return self._count - 1

    def read_block(self, page_no: int, cache: Optional[PageCache] = None) -> List[Record]:
        """
        Read the records of one page

        Args:
            page_no: Page number within this array
            cache: Optional op-local cache; a page already in it costs nothing

        Returns:
            Records stored on that page
        """
        if not 0 <= page_no < self.page_count:
            raise IndexError(f"page {page_no} out of range ({self.page_count} pages)")

        is_tail = page_no == self._count // self.per_page
        if is_tail and self._tail is not None:
            return list(self._tail)

        page_id = self._page_ids[page_no]
        if cache is not None and page_id in cache:
            return cache[page_id]

        count = self.per_page if not is_tail else self._count % self.per_page
        records = self.codec.unpack(self.mem.read_page(page_id), count)
        if cache is not None:
            cache[page_id] = records
        return records

    def read_record(self, index: int, cache: Optional[PageCache] = None) -> Record:
        if not 0 <= index < self._count:
            raise IndexError(f"record {index} out of range ({self._count} records)")
        return self.read_block(index // self.per_page, cache)[index % self.per_page]

    def read_all(self, cache: Optional[PageCache] = None) -> List[Record]:
        """Read every record (one counted read per page not already cached)"""
        records = []
        for page_no in range(self.page_count):
            records.extend(self.read_block(page_no, cache))
        return records

    def peek_all(self) -> List[Record]:
        """Every record, read without counting I/O; for instrumentation only"""
        records = []
        for page_no in range(self.page_count):
            is_tail = page_no == self._count // self.per_page
            if is_tail and self._tail is not None:
                records.extend(self._tail)
                continue
            count = self.per_page if not is_tail else self._count % self.per_page
            records.extend(self.codec.unpack(self.mem.peek_page(self._page_ids[page_no]), count))
        return records

    def truncate(self):
        """Drop all records but keep the pages allocated for reuse"""
        self._count = 0
        self._tail = [] if self.cached_tail else None

    def clear(self):
        """Drop all records and free every page"""
        for page_id in self._page_ids:
            self.mem.free_page(page_id)
        self._page_ids = []
        self.truncate()

    def sync(self):
        """Write the cached tail page back to memory"""
        if self.cached_tail and self._tail:
            self._store(self._count // self.per_page, self._tail)

    def evict(self):
        """Sync, then drop the cached tail so the next access reads it from memory"""
        self.sync()
        if self._tail_is_partial():
            self._tail = None
        elif self.cached_tail:
            self._tail = []
