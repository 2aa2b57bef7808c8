"""
I/O Model - Simulated paged external memory with exact access accounting
"""

from .paged_memory import PagedMemory, PageId, IoStats
from .packing import RecordCodec, Record
from .paged_array import PagedArray, PageCache

__all__ = ['PagedMemory', 'PageId', 'IoStats', 'RecordCodec', 'Record', 'PagedArray', 'PageCache']
