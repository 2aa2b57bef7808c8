"""
Dictionary Node - Plain pair array mirrored by a gadget, with hash-prefix children
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..gadget import Gadget, GadgetLedger, QueryTrace, new_gadget
from ..hashing import PolyHash, SeedStream, partition_hash
from ..io_model import PagedArray, PagedMemory, PageCache, RecordCodec
from ..utils.errors import NeedsRebuild
from .config import DictionaryLayout

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]  # (shrunk key h, global log index j)

GADGET_REBUILD_ATTEMPTS = 3


@dataclass
class NodeEvents:
    """Counters shared by every node of one tree"""
    nodes: int = 0
    distributions: int = 0
    gadget_rebuilds: int = 0


@dataclass
class NodeContext:
    """What every node of one tree shares"""
    layout: DictionaryLayout
    mem: PagedMemory
    seeds: SeedStream
    ledger: GadgetLedger
    events: NodeEvents


class DictNode:
    """
    One buffer-tree node: up to m_keys (h, j) pairs, stored plainly in
    `pending` and hashed into a gadget; full nodes push their pairs to
    children chosen by the next chunk of h.
    """

    def __init__(self, ctx: NodeContext, depth: int = 0):
        self.ctx = ctx
        self.depth = depth
        layout = ctx.layout
        self.pending = PagedArray(ctx.mem, RecordCodec(layout.pair_widths, layout.b))
        self.hash = PolyHash(k=layout.k, seed=next(ctx.seeds))
        self.gadget: Gadget = new_gadget(layout.gadget, ctx.mem, ctx.ledger)
        self.children: Dict[int, 'DictNode'] = {}
        ctx.events.nodes += 1

    def __len__(self) -> int:
        return len(self.pending)

    def __repr__(self) -> str:
        return f"DictNode(depth={self.depth}, pending={len(self.pending)}, children={len(self.children)})"

    @property
    def can_route(self) -> bool:
        return self.ctx.layout.can_route(self.depth)

    def hashed(self, h: int):
        """Gadget key (p, d, s) of shrunk key h under this node's hash"""
        layout = self.ctx.layout
        return partition_hash(self.hash, h, layout.b, layout.gadget.t)

    def _elements(self, pairs: Iterable[Pair]) -> List[Tuple[int, int, int, int]]:
        return [(*self.hashed(h), j) for h, j in pairs]

    def add(self, pairs: List[Pair]):
        """
        Store pairs in this node, distributing to children once it holds m_keys

        Raises:
            NeedsRebuild: The gadget could not be rebuilt within its capacity
        """
        if not pairs:
            return
        layout = self.ctx.layout
        if self.can_route and len(self.pending) + len(pairs) > layout.gadget.capacity:
            self.distribute(extra=pairs)
            return

        self.pending.extend(pairs)
        try:
            self.gadget.bulk_insert(self._elements(pairs))
        except NeedsRebuild as e:
            logger.warning(f"Node depth={self.depth}: {e}; rebuilding its gadget")
            self.rebuild_gadget()

        if self.can_route and len(self.pending) >= layout.m_keys:
            self.distribute()

    def distribute(self, extra: Sequence[Pair] = ()):
        """Move every pair (plus `extra`) to the children and empty this node"""
        layout = self.ctx.layout
        pairs = [tuple(r) for r in self.pending.read_all()] + list(extra)
        self.pending.clear()
        self.gadget.destroy()

        groups = defaultdict(list)
        for h, j in pairs:
            groups[layout.route(h, self.depth)].append((h, j))
        for index in sorted(groups):
            self.child(index).add(groups[index])

        self.ctx.events.distributions += 1
        logger.debug(f"Node depth={self.depth} distributed {len(pairs)} pairs to {len(groups)} children")

    def child(self, index: int) -> 'DictNode':
        node = self.children.get(index)
        if node is None:
            node = self.children[index] = DictNode(self.ctx, self.depth + 1)
        return node

    def rebuild_gadget(self):
        """
        Rebuild the gadget from the pair array with a fresh node hash

        Raises:
            NeedsRebuild: Every attempt overflowed; the caller rebuilds globally
        """
        pairs = [tuple(r) for r in self.pending.read_all()]
        for attempt in range(1, GADGET_REBUILD_ATTEMPTS + 1):
            self.gadget.destroy()
            self.hash = PolyHash(k=self.ctx.layout.k, seed=next(self.ctx.seeds))
            try:
                self.gadget.bulk_insert(self._elements(pairs))
            except NeedsRebuild:
                logger.warning(f"✗ Gadget rebuild {attempt}/{GADGET_REBUILD_ATTEMPTS} "
                               f"at depth={self.depth} overflowed")
                continue
            self.ctx.events.gadget_rebuilds += 1
            logger.info(f"✓ Rebuilt gadget at depth={self.depth} with {len(pairs)} pairs")
            return
        raise NeedsRebuild(f"node at depth={self.depth} failed {GADGET_REBUILD_ATTEMPTS} gadget rebuilds")

    def query(self, h: int, trace: Optional[QueryTrace] = None,
              cache: Optional[PageCache] = None) -> List[int]:
        """Log indices the gadget reports for h (may include shrink collisions)"""
        return self.gadget.query(self.hashed(h), trace, cache)

    def walk(self) -> Iterator['DictNode']:
        """This node and all descendants, depth first"""
        yield self
        for index in sorted(self.children):
            yield from self.children[index].walk()

    def check_mirror(self) -> List[str]:
        """Compare pending pairs against gadget contents (uncounted), for this node only"""
        expected = Counter(self._elements(tuple(r) for r in self.pending.peek_all()))
        actual = Counter(tuple(e) for e in self.gadget.elements())
        if expected == actual:
            return []
        missing = sum((expected - actual).values())
        extra = sum((actual - expected).values())
        return [f"node depth={self.depth}: gadget is missing {missing} and has {extra} extra elements"]

    def destroy(self):
        """Free the pages of this node and its subtree"""
        for node in self.children.values():
            node.destroy()
        self.children = {}
        self.pending.clear()
        self.gadget.destroy()
