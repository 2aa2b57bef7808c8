"""
Benchmark runner - verify, sweep and trace over the dictionary and the baseline
"""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, astuple
from math import log2
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence, TextIO, Tuple

from ..dictionary import Dictionary, check_lambda, derive_t_min, predict_baseline_costs, predict_costs
from ..io_model import IoStats
from ..reference import BaselineBufferTree, DELETE, INSERT, LOOKUP, Op, OracleMap
from ..utils.errors import BadParameters
from ..utils.logger import ProgressTracker, print_header
from .analysis import fit_through_origin
from .settings import BenchSettings
from .workload import WorkloadSpec, generate_workload, parse_mix

logger = logging.getLogger(__name__)

CSV_HEADER = ('structure', 'n', 'B', 'M', 'lambda', 'upd_reads', 'upd_writes', 'q_reads',
              'space_pages', 'rebuilds', 'pred_tu', 'pred_tq')
TRACE_HEADER = ('structure', 'op', 'kind', 'reads', 'writes', 'pages')
STRUCTURES = ('new', 'baseline')


class Structure(Protocol):
    """What the runner needs from a dictionary under test"""
    name: str

    def insert(self, key: int, value: int) -> None:
        ...

    def delete(self, key: int) -> None:
        ...

    def lookup(self, key: int) -> Optional[int]:
        ...

    def io_stats(self) -> IoStats:
        ...

    def space_pages(self) -> int:
        ...

    def pages_allocated(self) -> int:
        ...

    def rebuilds(self) -> int:
        ...


class NewStructure:
    """Dictionary behind the Structure interface"""
    name = 'new'

    def __init__(self, settings: BenchSettings, lam: Optional[int] = None):
        self.dictionary = Dictionary(settings.dictionary_config(lam))

    def insert(self, key: int, value: int):
        self.dictionary.insert(key, value)

    def delete(self, key: int):
        self.dictionary.delete(key)

    def lookup(self, key: int) -> Optional[int]:
        return self.dictionary.lookup(key)

    def io_stats(self) -> IoStats:
        return self.dictionary.io_stats()

    def space_pages(self) -> int:
        return self.dictionary.mem.pages_in_use()

    def pages_allocated(self) -> int:
        return self.dictionary.mem.allocations

    def rebuilds(self) -> int:
        return self.dictionary.rebuilds


class BaselineStructure:
    """BaselineBufferTree behind the Structure interface"""
    name = 'baseline'

    def __init__(self, settings: BenchSettings, fanout: Optional[int] = None):
        self.tree = BaselineBufferTree(
            n_max=settings.dictionary.n_max,
            page_words=settings.memory.page_words,
            word_bits=settings.memory.word_bits,
            fanout=fanout if fanout is not None else settings.baseline.fanout,
            page_budget=settings.memory.page_budget,
        )

    def insert(self, key: int, value: int):
        self.tree.insert(key, value)

    def delete(self, key: int):
        self.tree.delete(key)

    def lookup(self, key: int) -> Optional[int]:
        return self.tree.lookup(key)

    def io_stats(self) -> IoStats:
        return self.tree.io_stats()

    def space_pages(self) -> int:
        return self.tree.mem.pages_in_use()

    def pages_allocated(self) -> int:
        return self.tree.mem.allocations

    def rebuilds(self) -> int:
        return self.tree.rebuilds


def build_structures(settings: BenchSettings, structure: str) -> List[Structure]:
    """Structures selected by --structure (new, baseline or both)"""
    if structure == 'both':
        return [NewStructure(settings), BaselineStructure(settings)]
    if structure == 'new':
        return [NewStructure(settings)]
    if structure == 'baseline':
        return [BaselineStructure(settings)]
    raise BadParameters(f"unknown structure {structure!r}")


def workload_spec(settings: BenchSettings) -> WorkloadSpec:
    w = settings.workload
    if w.key_dist not in ('universe2n', 'uniform64'):
        raise BadParameters(f"key_dist={w.key_dist!r} is not universe2n or uniform64")
    return WorkloadSpec(n_ops=w.ops, mix=parse_mix(w.mix), key_dist=w.key_dist,
                        n=settings.dictionary.n_max, seed=w.seed)


def apply(structure: Structure, op: Op) -> Optional[int]:
    if op.kind == INSERT:
        structure.insert(op.key, op.value)
    elif op.kind == DELETE:
        structure.delete(op.key)
    else:
        return structure.lookup(op.key)
    return None


# ==================== verify ====================

@dataclass
class Disagreement:
    index: int
    op: Op
    answers: Dict[str, Optional[int]]

    def describe(self) -> str:
        triple = ', '.join(f"{name}={value}" for name, value in self.answers.items())
        return f"op {self.index} {self.op.kind}({self.op.key}): {triple}"


@dataclass
class VerifyReport:
    ops: int = 0
    lookups: int = 0
    disagreement: Optional[Disagreement] = None
    stats: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.disagreement is None


def inject_fault(dictionary: Dictionary, ops: Sequence[Op], start: int, oracle: OracleMap) -> Optional[int]:
    """
    Corrupt the log page holding the entry of the next positive lookup at or after `start`

    Returns:
        Index of the targeted lookup op, or None if there is none
    """
    touched = set()
    for index in range(start, len(ops)):
        op = ops[index]
        if op.kind != LOOKUP:
            touched.add(op.key)
            continue
        # a later write to the key would hide the corrupted entry
        if op.key in touched or oracle.lookup(op.key) is None:
            continue
        entry = dictionary.locate(op.key)
        if entry is None:
            continue
        dictionary.global_log.evict()
        page_id = dictionary.log_page_of(entry)
        dictionary.mem.write_page(page_id, ~dictionary.mem.peek_page(page_id))
        logger.warning(f"✗ Injected fault: flipped log page {page_id} (entry {entry}) ahead of op {index}")
        return index
    logger.warning(f"No positive lookup at or after op {start}; no fault injected")
    return None


def cmd_verify(
    settings: BenchSettings,
    structure: str = 'both',
    fault_at: Optional[int] = None,
    page_file: Optional[Path] = None
) -> VerifyReport:
    """
    Run the selected structures and the oracle in lockstep

    Args:
        settings: Benchmark settings
        structure: new, baseline or both
        fault_at: Op index at which to corrupt one log page of the dictionary
        page_file: Save the dictionary here after a passing run

    Returns:
        VerifyReport; the first lookup answer that differs from the oracle's fails it
    """
    structures = build_structures(settings, structure)
    target = next((s for s in structures if s.name == 'new'), None)
    if fault_at is not None and target is None:
        raise BadParameters("--inject-fault needs the new structure")

    ops = list(generate_workload(workload_spec(settings)))
    oracle = OracleMap()
    report = VerifyReport()
    tracker = ProgressTracker(len(ops), "Verifying")
    every = max(1, len(ops) // 10)

    print_header(f"VERIFY {structure} | {len(ops)} ops | seed {settings.workload.seed}")
    for index, op in enumerate(ops):
        if fault_at is not None and index == fault_at:
            inject_fault(target.dictionary, ops, index, oracle)

        answers = {s.name: apply(s, op) for s in structures}
        expected = oracle.apply(op)
        report.ops += 1

        if op.kind == LOOKUP:
            report.lookups += 1
            agreed = all(a == expected for a in answers.values())
            tracker.update(agreed=agreed)
            if not agreed:
                answers['oracle'] = expected
                report.disagreement = Disagreement(index, op, answers)
                logger.error(f"✗ Disagreement at {report.disagreement.describe()}")
                break
        else:
            tracker.update()

        if (index + 1) % every == 0:
            logger.info(tracker.get_progress_str())

    logger.info(tracker.get_stats_str())
    for s in structures:
        io = s.io_stats()
        report.stats[f"{s.name} reads"] = io.reads
        report.stats[f"{s.name} writes"] = io.writes
        report.stats[f"{s.name} pages"] = s.space_pages()
        report.stats[f"{s.name} rebuilds"] = s.rebuilds()

    if report.passed:
        logger.info(f"✓ {report.ops} ops, {report.lookups} lookups agree with the oracle")
        if page_file is not None and target is not None:
            target.dictionary.save(page_file)
    return report


# ==================== sweep ====================

@dataclass
class BenchRow:
    structure: str
    n: int
    B: int
    M: int
    lam: int
    upd_reads: float
    upd_writes: float
    q_reads: float
    space_pages: int
    rebuilds: int
    pred_tu: float
    pred_tq: float

    def csv_fields(self) -> List[str]:
        return [f"{v:.6f}" if isinstance(v, float) else str(v) for v in astuple(self)]


@dataclass
class Measurement:
    updates: int = 0
    upd_reads: int = 0
    upd_writes: int = 0
    lookups: int = 0
    q_reads: int = 0

    def add(self, op: Op, delta: IoStats):
        if op.kind == LOOKUP:
            self.lookups += 1
            self.q_reads += delta.reads
        else:
            self.updates += 1
            self.upd_reads += delta.reads
            self.upd_writes += delta.writes

    def per_update(self) -> Tuple[float, float]:
        n = max(1, self.updates)
        return self.upd_reads / n, self.upd_writes / n

    def per_lookup(self) -> float:
        return self.q_reads / max(1, self.lookups)


def measure(structure: Structure, ops: Sequence[Op]) -> Measurement:
    """Apply ops, attributing each op's I/O to updates or lookups"""
    m = Measurement()
    before = structure.io_stats()
    for op in ops:
        apply(structure, op)
        after = structure.io_stats()
        m.add(op, after - before)
        before = after
    return m


def run_point(settings: BenchSettings, structure: str, lam: int) -> BenchRow:
    """One sweep row: run the workload on a fresh structure at lambda (or lambda_b)"""
    n = settings.dictionary.n_max
    B = settings.memory.page_words
    M = settings.dictionary.cache_words
    if structure == 'new':
        target = NewStructure(settings, lam)
        pred_tu, pred_tq = predict_costs(n, B, M, lam)
    else:
        target = BaselineStructure(settings, fanout=lam)
        pred_tu, pred_tq = predict_baseline_costs(n, B, lam)

    m = measure(target, list(generate_workload(workload_spec(settings))))
    upd_reads, upd_writes = m.per_update()
    row = BenchRow(structure, n, B, M, lam, upd_reads, upd_writes, m.per_lookup(),
                   target.space_pages(), target.rebuilds(), pred_tu, pred_tq)
    logger.info(f"✓ {structure} lambda={lam}: upd={upd_reads + upd_writes:.3f} q={row.q_reads:.3f} "
                f"pages={row.space_pages}")
    return row


def _run_point_args(args: Tuple[BenchSettings, str, int]) -> BenchRow:
    return run_point(*args)


def shared_t_min(settings: BenchSettings, lambdas: Sequence[int]) -> Dict[int, List[int]]:
    """t_min values that more than one lambda maps to, with those lambdas"""
    groups: Dict[int, List[int]] = {}
    for lam in lambdas:
        t_min = settings.dictionary.t_min or derive_t_min(lam)
        groups.setdefault(t_min, []).append(lam)
    return {t: lams for t, lams in groups.items() if len(lams) > 1}


def warn_shared_t_min(settings: BenchSettings, lambdas: Sequence[int]):
    for t_min, lams in shared_t_min(settings, lambdas).items():
        logger.warning(f"lambda={','.join(str(l) for l in lams)} all give t_min={t_min}; "
                       f"their new rows share one gadget layout")


def cmd_sweep(
    settings: BenchSettings,
    lambdas: Sequence[int],
    jobs: int = 1,
    structure: str = 'both'
) -> List[BenchRow]:
    """
    A "new" row then a "baseline" row (lambda_b = lambda) for every lambda, in order

    Args:
        settings: Benchmark settings
        lambdas: lambda values, one row per selected structure each
        jobs: Parallel sweep points
        structure: new, baseline or both

    Raises:
        BadParameters: Some lambda is outside the admissible range, or structure is unknown
    """
    if structure not in (*STRUCTURES, 'both'):
        raise BadParameters(f"unknown structure {structure!r}")
    chosen = STRUCTURES if structure == 'both' else (structure,)
    if 'new' in chosen:
        n = settings.dictionary.n_max
        B = settings.memory.page_words
        M = settings.dictionary.cache_words
        for lam in lambdas:
            check_lambda(n, B, M, lam)
        warn_shared_t_min(settings, lambdas)

    points = [(settings, s, lam) for lam in lambdas for s in chosen]
    print_header(f"SWEEP lambda={','.join(str(l) for l in lambdas)} | {len(points)} points | jobs {jobs}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_point_args, points))
    else:
        rows = [run_point(*p) for p in points]
    return rows


def write_csv(rows: Sequence[BenchRow], out: TextIO):
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())


def log_trend_fits(rows: Sequence[BenchRow]):
    """Fit measured costs against the predicted shapes and log the results"""
    new_rows = [r for r in rows if r.structure == 'new']
    if len(new_rows) < 2:
        return
    B = new_rows[0].B
    lg_n = log2(new_rows[0].n)
    update = fit_through_origin([r.lam / B for r in new_rows], [r.upd_reads + r.upd_writes for r in new_rows])
    query = fit_through_origin([lg_n / log2(r.lam) for r in new_rows], [r.q_reads for r in new_rows])
    logger.info(f"Update I/O vs lambda/B: C={update.slope:.3f} R^2={update.r_squared:.3f}")
    logger.info(f"Query I/O vs lg n/lg lambda: C={query.slope:.3f} R^2={query.r_squared:.3f}")


# ==================== trace ====================

def cmd_trace(settings: BenchSettings, structure: str, out: TextIO) -> Dict[str, IoStats]:
    """
    Write one line per op: structure, op index, kind, reads, writes, pages allocated so far

    Returns:
        Final IoStats per structure
    """
    ops = list(generate_workload(workload_spec(settings)))
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(TRACE_HEADER)
    totals = {}
    for s in build_structures(settings, structure):
        before = s.io_stats()
        for index, op in enumerate(ops):
            apply(s, op)
            after = s.io_stats()
            delta = after - before
            writer.writerow((s.name, index, op.kind, delta.reads, delta.writes, s.pages_allocated()))
            before = after
        totals[s.name] = s.io_stats()
    return totals
