"""
Baseline Buffer Tree - Classic fan-out lambda_b buffer tree over uncompressed pairs

Keys move as whole (key, log index) pairs. The root buffer is one page held
in cache; each internal node buffers one page and pushes it to its children
when it fills; leaves keep everything they receive. Operations are appended
to a log exactly as in Dictionary, and a lookup returns the newest log entry
found on the key's root-to-leaf path.
"""

import logging
from bisect import bisect_right
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from ..hashing import splitmix64
from ..io_model import IoStats, PagedArray, PagedMemory, PageCache, RecordCodec
from ..utils.errors import BadParameters

logger = logging.getLogger(__name__)

KEY_BITS = 64
INDEX_BITS = 32
KEY_SPACE = 1 << 64
OP_INSERT = 0
OP_DELETE = 1

Pair = Tuple[int, int]  # (key, log index)


def scramble(key: int) -> int:
    """Bijective 64-bit mix of a key; pivots partition this space evenly"""
    return splitmix64(key)[1]


class BufferNode:
    """A node covering scrambled keys [lo, hi), with sorted pivots for its children"""

    def __init__(self, tree: 'BaselineBufferTree', depth: int, lo: int, hi: int):
        self.tree = tree
        self.depth = depth
        self.lo = lo
        self.hi = hi
        self.is_leaf = depth == tree.depth
        fanout = tree.fanout
        self.pivots = [] if self.is_leaf else [lo + i * (hi - lo) // fanout for i in range(1, fanout)]
        self.children: Dict[int, 'BufferNode'] = {}
        # the root buffer lives in cache; every other node buffers on pages
        self.buffer = None if depth == 0 else PagedArray(tree.mem, tree.pair_codec)

    def slot(self, scrambled: int) -> int:
        return bisect_right(self.pivots, scrambled)

    def child(self, slot: int) -> 'BufferNode':
        node = self.children.get(slot)
        if node is None:
            bounds = [self.lo] + self.pivots + [self.hi]
            node = self.children[slot] = BufferNode(self.tree, self.depth + 1, bounds[slot], bounds[slot + 1])
        return node

    def push_down(self, pairs: List[Pair]):
        groups = defaultdict(list)
        for pair in pairs:
            groups[self.slot(scramble(pair[0]))].append(pair)
        for slot in sorted(groups):
            self.child(slot).add(groups[slot])

    def add(self, pairs: List[Pair]):
        """Buffer pairs; a full internal buffer flushes one level down"""
        if self.is_leaf:
            self.buffer.extend(pairs)
            return
        per_page = self.buffer.per_page
        if len(self.buffer) + len(pairs) < per_page:
            self.buffer.extend(pairs)
            return
        held = [tuple(r) for r in self.buffer.read_all()]
        self.buffer.truncate()
        self.tree.flushes += 1
        self.push_down(held + pairs)

    def matches(self, key: int, cache: PageCache) -> List[int]:
        if self.buffer is None or not len(self.buffer):
            return []
        return [j for k, j in self.buffer.read_all(cache) if k == key]


class BaselineBufferTree:
    """Buffer tree with fan-out lambda_b in [2, B] and a static pivot layout"""

    def __init__(
        self,
        n_max: int,
        page_words: int = 64,
        word_bits: int = 64,
        fanout: int = 8,
        mem: Optional[PagedMemory] = None,
        page_budget: Optional[int] = None
    ):
        """
        Initialize an empty tree

        Args:
            n_max: Expected number of keys; sets the depth
            page_words: B
            word_bits: w
            fanout: lambda_b, children per internal node
            mem: Paged memory to use (a fresh one if None)
            page_budget: Max live pages of a fresh memory
        """
        if not 2 <= fanout <= page_words:
            raise BadParameters(f"fanout={fanout} is outside [2, B={page_words}]")
        self.mem = mem or PagedMemory(page_words, word_bits, page_budget=page_budget)
        self.fanout = fanout
        self.n_max = n_max
        self.pair_codec = RecordCodec((KEY_BITS, INDEX_BITS), self.mem.page_bits)
        self.per_page = self.pair_codec.per_page

        depth = 1
        while fanout ** depth * self.per_page < n_max:
            depth += 1
        self.depth = depth

        self.log = PagedArray(self.mem, RecordCodec((KEY_BITS, KEY_BITS, 1), self.mem.page_bits),
                              cached_tail=True)
        self.root = BufferNode(self, 0, 0, KEY_SPACE)
        self.root_batch: List[Pair] = []
        self.flushes = 0
        self.rebuilds = 0
        logger.debug(f"Baseline buffer tree: fanout={fanout} depth={depth} per_page={self.per_page}")

    def __repr__(self) -> str:
        return f"BaselineBufferTree(fanout={self.fanout}, depth={self.depth}, log={len(self.log)})"

    def _append(self, key: int, value: int, op: int):
        j = self.log.append((key, value, op))
        if j >> INDEX_BITS:
            raise BadParameters(f"log index {j} exceeds {INDEX_BITS} bits")
        self.root_batch.append((key, j))
        if len(self.root_batch) >= self.per_page:
            batch, self.root_batch = self.root_batch, []
            self.root.push_down(batch)

    def insert(self, key: int, value: int):
        self._append(key, value, OP_INSERT)

    def delete(self, key: int):
        self._append(key, 0, OP_DELETE)

    def lookup(self, key: int) -> Optional[int]:
        """Value of the newest log entry for key, None if absent or a tombstone"""
        cache: PageCache = {}
        candidates = [j for k, j in self.root_batch if k == key]
        scrambled = scramble(key)
        node = self.root
        while not node.is_leaf:
            node = node.children.get(node.slot(scrambled))
            if node is None:
                break
            candidates.extend(node.matches(key, cache))
        if not candidates:
            return None
        _, value, op = self.log.read_record(max(candidates), cache)
        return None if op == OP_DELETE else value

    def io_stats(self) -> IoStats:
        return self.mem.io_stats()
