"""
Paged Memory - Simulated external memory with exact page I/O accounting

Memory is a growable sequence of fixed-width pages of b = B*w bits. Every
read_page counts one read; every write_page or alloc_page counts one write.
The cache is not modeled as storage: work on data already fetched is free.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from bitarray import bitarray
from bitarray.util import zeros

from ..utils.errors import CapacityExhausted, InvalidPage, SizeMismatch, BadParameters, PageFileError

logger = logging.getLogger(__name__)

PageId = int

PAGE_FILE_MAGIC = b'EMPG'
PAGE_FILE_VERSION = 1
_HEADER = struct.Struct('<4sIIII')


@dataclass(frozen=True)
class IoStats:
    """Page read/write counters at one point in time"""
    reads: int = 0
    writes: int = 0

    @property
    def total(self) -> int:
        return self.reads + self.writes

    def __sub__(self, other: 'IoStats') -> 'IoStats':
        return IoStats(self.reads - other.reads, self.writes - other.writes)

    def __add__(self, other: 'IoStats') -> 'IoStats':
        return IoStats(self.reads + other.reads, self.writes + other.writes)


class PagedMemory:
    """Array of b-bit pages with read/write counters"""

    def __init__(
        self,
        page_words: int = 64,
        word_bits: int = 64,
        page_budget: Optional[int] = None,
        n_max: Optional[int] = None
    ):
        """
        Initialize paged memory

        Args:
            page_words: B, words per page
            word_bits: w, bits per word
            page_budget: Maximum number of live pages (None = unbounded)
            n_max: If given, reject configurations with B < lg n_max
        """
        if page_words < 1 or word_bits < 1:
            raise BadParameters(f"page_words={page_words} and word_bits={word_bits} must be positive")
        if n_max is not None and n_max > 1 and page_words < (n_max - 1).bit_length():
            raise BadParameters(f"B={page_words} is below lg n={(n_max - 1).bit_length()}")
        if page_budget is not None and page_budget < 0:
            raise BadParameters(f"page_budget={page_budget} must be non-negative")

        self.page_words = page_words
        self.word_bits = word_bits
        self.page_bits = page_words * word_bits
        self.page_budget = page_budget

        self._pages: List[Optional[bitarray]] = []
        self._free: List[PageId] = []
        self.reads = 0
        self.writes = 0
        self.allocations = 0              # pages ever allocated, freed ones included

    def __repr__(self) -> str:
        return (f"PagedMemory(B={self.page_words}, w={self.word_bits}, "
                f"pages={self.pages_in_use()}, reads={self.reads}, writes={self.writes})")

    def _check(self, page_id: PageId) -> bitarray:
        if not 0 <= page_id < len(self._pages) or self._pages[page_id] is None:
            raise InvalidPage(f"page {page_id} is not allocated ({len(self._pages)} page ids issued)")
        return self._pages[page_id]

    def alloc_page(self) -> PageId:
        """
        Allocate a zeroed page (counts as one write)

        Freed page ids are reused before new ids are issued.

        Returns:
            PageId of the fresh page
        """
        if self.page_budget is not None and self.pages_in_use() >= self.page_budget:
            raise CapacityExhausted(f"page budget of {self.page_budget} pages exhausted")

        if self._free:
            page_id = self._free.pop()
            self._pages[page_id] = zeros(self.page_bits, endian='big')
        else:
            page_id = len(self._pages)
            self._pages.append(zeros(self.page_bits, endian='big'))

        self.writes += 1
        self.allocations += 1
        return page_id

    def free_page(self, page_id: PageId):
        """Return a page to the free list (bookkeeping only, no I/O)"""
        self._check(page_id)
        self._pages[page_id] = None
        self._free.append(page_id)

    def read_page(self, page_id: PageId) -> bitarray:
        """Read a page image (counts as one read)"""
        image = self._check(page_id)
        self.reads += 1
        return image.copy()

    def peek_page(self, page_id: PageId) -> bitarray:
        """Read a page image without counting; reserved for instrumentation"""
        return self._check(page_id).copy()

    def write_page(self, page_id: PageId, image: bitarray):
        """Replace a page image (counts as one write)"""
        self._check(page_id)
        if len(image) != self.page_bits:
            raise SizeMismatch(f"page image has {len(image)} bits, expected {self.page_bits}")
        self._pages[page_id] = image.copy()
        self.writes += 1

    def io_stats(self) -> IoStats:
        return IoStats(self.reads, self.writes)

    def reset_stats(self):
        self.reads = 0
        self.writes = 0

    def pages_in_use(self) -> int:
        return len(self._pages) - len(self._free)

    def save(self, path: Path):
        """
        Write every page to a page file

        Format: magic 'EMPG', then little-endian u32 version, B, w, page_count,
        then page_count raw images of b/8 bytes. Freed pages are stored zeroed.
        """
        if self.page_bits % 8:
            raise PageFileError(f"page size of {self.page_bits} bits is not byte aligned")
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        blank = zeros(self.page_bits, endian='big')
        with open(path, 'wb') as f:
            f.write(_HEADER.pack(PAGE_FILE_MAGIC, PAGE_FILE_VERSION,
                                 self.page_words, self.word_bits, len(self._pages)))
            for image in self._pages:
                f.write((image if image is not None else blank).tobytes())
        logger.info(f"✓ Saved {len(self._pages)} pages to {path}")

    @classmethod
    def load(cls, path: Path, page_budget: Optional[int] = None) -> 'PagedMemory':
        """
        Load a page file written by save()

        All pages come back allocated and counters start at zero.
        """
        path = Path(path)
        with open(path, 'rb') as f:
            header = f.read(_HEADER.size)
            if len(header) != _HEADER.size:
                raise PageFileError(f"{path}: truncated header")
            magic, version, page_words, word_bits, page_count = _HEADER.unpack(header)
            if magic != PAGE_FILE_MAGIC:
                raise PageFileError(f"{path}: bad magic {magic!r}")
            if version != PAGE_FILE_VERSION:
                raise PageFileError(f"{path}: unsupported version {version}")

            mem = cls(page_words=page_words, word_bits=word_bits, page_budget=page_budget)
            page_bytes = mem.page_bits // 8
            for page_id in range(page_count):
                raw = f.read(page_bytes)
                if len(raw) != page_bytes:
                    raise PageFileError(f"{path}: page {page_id} truncated")
                image = bitarray(endian='big')
                image.frombytes(raw)
                mem._pages.append(image)

        logger.info(f"✓ Loaded {page_count} pages from {path}")
        return mem
