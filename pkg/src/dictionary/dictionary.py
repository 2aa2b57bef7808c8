"""
Dictionary - External-memory key/value dictionary over compressed gadgets

Every operation is appended to a global log. The log index, tagged with a
shrunk key h in [n^2], travels down a buffer tree whose nodes each hold a
plain pair array and a gadget over the same pairs. A lookup asks the gadgets
on h's root-to-leaf path for candidate log indices and checks them, newest
first, against the keys stored in the log.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

from ..gadget import GadgetLedger, QueryTrace
from ..hashing import PolyHash, SeedStream, shrink_key
from ..io_model import IoStats, PagedArray, PagedMemory, PageCache, PageId, RecordCodec
from ..utils.errors import DictionaryFull, GadgetdictError, NeedsRebuild, PageFileError
from .config import (
    DictionaryConfig, DictionaryLayout, derive_layout,
    KEY_BITS, VALUE_BITS, OP_DELETE, OP_INSERT,
)
from .node import DictNode, NodeContext, NodeEvents, Pair

logger = logging.getLogger(__name__)

GLOBAL_REBUILD_ATTEMPTS = 3
LOG_CODEC_WIDTHS = (KEY_BITS, VALUE_BITS, 1)


class LogEntry(NamedTuple):
    key: int
    value: int
    op: int

    @property
    def is_tombstone(self) -> bool:
        return self.op == OP_DELETE


@dataclass
class DictionaryStats:
    """Lifetime counters and current shape of a Dictionary"""
    log_length: int = 0
    deletions: int = 0
    rebuilds: int = 0
    distributions: int = 0
    gadget_rebuilds: int = 0
    nodes: int = 0
    depth: int = 0
    pages_in_use: int = 0
    lookups: int = 0
    gadget_false_positives: int = 0
    shrink_false_positives: int = 0
    distribution_violations: int = 0


class Dictionary:
    """Insert / delete / lookup of word-sized keys with word-sized values"""

    def __init__(self, config: Optional[DictionaryConfig] = None, mem: Optional[PagedMemory] = None):
        """
        Initialize an empty dictionary

        Args:
            config: Parameters (defaults if None)
            mem: Paged memory to use; a fresh one sized from config if None

        Raises:
            BadParameters: The config violates a parameter bound
        """
        self.config = config or DictionaryConfig()
        self.layout: DictionaryLayout = derive_layout(self.config)
        if mem is None:
            mem = PagedMemory(self.config.page_words, self.config.word_bits,
                              page_budget=self.config.page_budget, n_max=self.config.n_max)
        self.mem = mem
        self.seeds = SeedStream(self.config.seed)
        self.ledger = GadgetLedger()
        self.events = NodeEvents()

        self.log_codec = RecordCodec(LOG_CODEC_WIDTHS, self.layout.b)
        self.pair_per_page = RecordCodec(self.layout.pair_widths, self.layout.b).per_page

        self.deletions = 0
        self.rebuilds = 0
        self.lookups = 0
        self.live_bound = 0               # upper bound on live keys; exact after a rebuild
        self._tight = False               # near n_max: updates check liveness to keep live_bound exact
        self.gadget_false_positives = 0
        self.shrink_false_positives = 0
        self.distribution_violations = 0
        self.last_trace = QueryTrace()

        self._fresh_structure()
        logger.debug(f"Dictionary ready: n_max={self.config.n_max} lambda={self.config.lam} "
                     f"t={self.layout.gadget.t} t_min={self.layout.t_min} m_keys={self.layout.m_keys}")

    def _fresh_structure(self):
        self.global_log = PagedArray(self.mem, self.log_codec, cached_tail=True)
        self.shrink_hash = PolyHash(k=self.layout.k, seed=next(self.seeds))
        self.batch: List[Pair] = []
        ctx = NodeContext(self.layout, self.mem, self.seeds, self.ledger, self.events)
        self.root = DictNode(ctx)

    def __len__(self) -> int:
        """Log length (entries since the last rebuild)"""
        return len(self.global_log)

    def __repr__(self) -> str:
        return (f"Dictionary(n_max={self.config.n_max}, lambda={self.config.lam}, log={len(self.global_log)}, "
                f"rebuilds={self.rebuilds}, pages={self.mem.pages_in_use()})")

    def shrink(self, key: int) -> int:
        return shrink_key(self.shrink_hash, key, self.layout.n)

    # ==================== Updates ====================

    def insert(self, key: int, value: int):
        """
        Insert or overwrite key

        Raises:
            DictionaryFull: key is new and n_max keys are already live; nothing is logged
        """
        self._admit(key)
        self._append(LogEntry(key, value, OP_INSERT))

    def delete(self, key: int):
        """Delete key (a no-op for absent keys); rebuilds after n_max/2 deletions"""
        if self._tight and self._is_live(key):
            self.live_bound -= 1
        self.deletions += 1
        self._append(LogEntry(key, 0, OP_DELETE))
        if self.deletions >= self.config.n_max / 2:
            logger.info(f"Deletion count {self.deletions} reached n_max/2; rebuilding")
            self.rebuild()

    def _admit(self, key: int):
        """
        Count an insert of key against n_max before it is logged

        Outside tight mode every insert counts as new. When that bound reaches
        n_max a compaction makes it exact; from then on, while the live set
        stays within n_max/4 of the limit, each update checks liveness first.
        """
        n_max = self.config.n_max
        if not self._tight and self.live_bound >= n_max:
            logger.info(f"Live bound reached n_max={n_max}; compacting to count live keys")
            self.rebuild()
        if not self._tight:
            self.live_bound += 1
            return
        if self._is_live(key):
            return
        if self.live_bound >= n_max:
            raise DictionaryFull(f"inserting key {key} would exceed n_max={n_max} live keys")
        self.live_bound += 1

    def _is_live(self, key: int) -> bool:
        j = self.locate(key)
        return j is not None and not LogEntry(*self.global_log.read_record(j)).is_tombstone

    def _append(self, entry: LogEntry):
        j = self.global_log.append(entry)
        self.batch.append((self.shrink(entry.key), j))
        try:
            if len(self.batch) >= self.pair_per_page:
                batch, self.batch = self.batch, []
                self.root.add(batch)
                if self.config.debug:
                    self._assert_mirror()
        except NeedsRebuild as e:
            logger.warning(f"✗ {e}; rebuilding the whole dictionary")
            self.rebuild()
            return

        if len(self.global_log) >= 2 * self.config.n_max:
            logger.info(f"Log reached 2*n_max={2 * self.config.n_max} entries; compacting")
            self.rebuild()

    # ==================== Lookup ====================

    def lookup(self, key: int) -> Optional[int]:
        """
        Value of key, or None if absent or deleted

        The newest log entry holding key decides.
        """
        self.lookups += 1
        trace = QueryTrace()
        cache: PageCache = {}
        h = self.shrink(key)

        candidates = {j for hh, j in self.batch if hh == h}
        node = self.root
        while node is not None:
            candidates.update(node.query(h, trace, cache))
            node = node.children.get(self.layout.route(h, node.depth)) if node.can_route else None

        self.last_trace = trace
        self.gadget_false_positives += trace.false_positives
        self.distribution_violations += trace.distribution_violations

        for j in sorted(candidates, reverse=True):
            entry = LogEntry(*self.global_log.read_record(j, cache))
            if entry.key != key:
                self.shrink_false_positives += 1
                continue
            return None if entry.is_tombstone else entry.value
        return None

    def locate(self, key: int) -> Optional[int]:
        """Index of the newest log entry for key, or None"""
        h = self.shrink(key)
        candidates = {j for hh, j in self.batch if hh == h}
        node = self.root
        while node is not None:
            candidates.update(node.query(h))
            node = node.children.get(self.layout.route(h, node.depth)) if node.can_route else None
        for j in sorted(candidates, reverse=True):
            if self.global_log.read_record(j)[0] == key:
                return j
        return None

    def log_page_of(self, index: int) -> PageId:
        """PageId of the global log page holding entry `index`"""
        return self.global_log.page_id(index // self.global_log.per_page)

    # ==================== Rebuild ====================

    def live_entries(self, counted: bool = True) -> List[Tuple[int, int]]:
        """(key, value) of every live key, in order of its newest log entry"""
        records = self.global_log.read_all() if counted else self.global_log.peek_all()
        latest: Dict[int, Tuple[int, LogEntry]] = {}
        for j, record in enumerate(records):
            entry = LogEntry(*record)
            latest[entry.key] = (j, entry)
        live = sorted((j, e) for j, e in latest.values() if not e.is_tombstone)
        return [(e.key, e.value) for _, e in live]

    def rebuild(self):
        """
        Rebuild from the live set with fresh hash seeds

        Raises:
            DictionaryFull: The live set exceeds n_max
        """
        live = self.live_entries()
        if len(live) > self.config.n_max:
            raise DictionaryFull(f"{len(live)} live keys exceed n_max={self.config.n_max}")

        for attempt in range(1, GLOBAL_REBUILD_ATTEMPTS + 1):
            self.root.destroy()
            self.global_log.clear()
            self._fresh_structure()
            self.deletions = 0
            try:
                self._reinsert(live)
            except NeedsRebuild as e:
                logger.warning(f"✗ Rebuild attempt {attempt}/{GLOBAL_REBUILD_ATTEMPTS} failed: {e}")
                continue
            self.rebuilds += 1
            self.live_bound = len(live)
            self._tight = len(live) >= self.config.n_max - self.config.n_max // 4
            logger.info(f"✓ Rebuilt dictionary with {len(live)} live keys "
                        f"({self.mem.pages_in_use()} pages in use)")
            return
        raise DictionaryFull(f"rebuild failed {GLOBAL_REBUILD_ATTEMPTS} times for {len(live)} keys")

    def _reinsert(self, live: List[Tuple[int, int]]):
        per_page = self.pair_per_page
        for key, value in live:
            j = self.global_log.append(LogEntry(key, value, OP_INSERT))
            self.batch.append((self.shrink(key), j))
            if len(self.batch) >= per_page:
                batch, self.batch = self.batch, []
                self.root.add(batch)

    # ==================== Inspection ====================

    def nodes(self) -> List[DictNode]:
        return list(self.root.walk())

    def check_mirror(self) -> List[str]:
        """Full sweep of every node: pending pairs and gadget hold the same multiset (uncounted)"""
        problems = []
        for node in self.root.walk():
            problems.extend(node.check_mirror())
        return problems

    def _assert_mirror(self):
        problems = self.check_mirror()
        if problems:
            for problem in problems:
                logger.error(f"✗ {problem}")
            raise GadgetdictError(f"node mirror violated: {problems[0]}")

    def stats(self) -> DictionaryStats:
        nodes = self.nodes()
        return DictionaryStats(
            log_length=len(self.global_log),
            deletions=self.deletions,
            rebuilds=self.rebuilds,
            distributions=self.events.distributions,
            gadget_rebuilds=self.events.gadget_rebuilds,
            nodes=len(nodes),
            depth=max(node.depth for node in nodes),
            pages_in_use=self.mem.pages_in_use(),
            lookups=self.lookups,
            gadget_false_positives=self.gadget_false_positives,
            shrink_false_positives=self.shrink_false_positives,
            distribution_violations=self.distribution_violations,
        )

    def io_stats(self) -> IoStats:
        return self.mem.io_stats()

    # ==================== Persistence ====================

    def save(self, page_file: Path) -> Path:
        """
        Write the page file plus a `.manifest` of key=value lines next to it

        Returns:
            Path of the manifest
        """
        page_file = Path(page_file)
        self.global_log.sync()
        self.mem.save(page_file)

        fields = self.config.model_dump()
        fields.update({
            'log_count': len(self.global_log),
            'log_page_ids': ','.join(str(p) for p in self.global_log.page_ids),
            'log_root': self.global_log.page_ids[0] if self.global_log.page_ids else '',
        })
        manifest = manifest_path(page_file)
        with open(manifest, 'w') as f:
            for name, value in fields.items():
                f.write(f"{name}={'' if value is None else value}\n")
        logger.info(f"✓ Saved dictionary manifest to {manifest}")
        return manifest

    @classmethod
    def load(cls, page_file: Path) -> 'Dictionary':
        """
        Rebuild a dictionary from a saved page file by replaying its log

        Raises:
            PageFileError: Missing or inconsistent manifest
        """
        page_file = Path(page_file)
        fields = read_manifest(manifest_path(page_file))
        try:
            log_count = int(fields.pop('log_count'))
            raw_ids = fields.pop('log_page_ids')
            fields.pop('log_root', None)
        except KeyError as e:
            raise PageFileError(f"{page_file}: manifest lacks {e}")
        config = DictionaryConfig(**{k: v for k, v in fields.items() if v != ''})

        saved = PagedMemory.load(page_file)
        log = PagedArray.attach(saved, RecordCodec(LOG_CODEC_WIDTHS, saved.page_bits),
                                [int(p) for p in raw_ids.split(',') if p], log_count)
        entries = [LogEntry(*r) for r in log.read_all()]

        d = cls(config)
        for entry in entries:
            if entry.is_tombstone:
                d.delete(entry.key)
            else:
                d.insert(entry.key, entry.value)
        logger.info(f"✓ Replayed {len(entries)} log entries from {page_file}")
        return d


def manifest_path(page_file: Path) -> Path:
    page_file = Path(page_file)
    return page_file.with_name(page_file.name + '.manifest')


def read_manifest(path: Path) -> Dict[str, str]:
    if not path.exists():
        raise PageFileError(f"manifest {path} not found")
    fields = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            name, sep, value = line.partition('=')
            if not sep:
                raise PageFileError(f"{path}: malformed line {line!r}")
            fields[name] = value
    return fields
