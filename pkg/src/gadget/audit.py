"""
Gadget Audit - Uncounted inspection of gadget contents and structure

Everything here reads pages through peek_page, so no I/O is counted.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List

from .base import BaseGadget
from .params import GadgetElement
from .recursive import Gadget, RecursiveGadget


@dataclass
class GadgetStats:
    """Snapshot of one gadget hierarchy"""
    elements: int = 0
    pages: int = 0
    level_elements: Dict[int, int] = field(default_factory=dict)
    little_flushes: int = 0
    big_flushes: int = 0
    base_flushes: int = 0
    false_positives: int = 0
    distribution_violations: int = 0


@dataclass
class InvariantReport:
    """Where each log element of a recursive gadget is represented"""
    tail: int = 0
    top: int = 0
    bottom: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def gadget_elements(g: Gadget) -> List[GadgetElement]:
    """Multiset dump of a gadget's elements, in storage order"""
    return g.elements()


def gadget_stats(g: Gadget) -> GadgetStats:
    """
    Element, page and flush counts for a gadget

    Flush and false-positive counts come from the gadget's ledger, so they
    cover every gadget sharing it.
    """
    ledger = g.ledger
    return GadgetStats(
        elements=len(g),
        pages=g.page_count(),
        level_elements=g.level_elements(),
        little_flushes=ledger.total('little_flushes'),
        big_flushes=ledger.total('big_flushes'),
        base_flushes=ledger.total('base_flushes'),
        false_positives=ledger.total('false_positives'),
        distribution_violations=ledger.total('distribution_violations'),
    )


def classify_invariant(g: Gadget) -> InvariantReport:
    """
    Sweep every log element and check it is stored exactly once below the log

    An element in block i is either in the tail (i >= hi), top-compressed
    in the top with backpointer i (lo <= i < hi), or bottom-compressed in
    bottoms[high(d)] with backpointer i (i < lo). Children are checked
    recursively; a base gadget has no log and reports nothing.
    """
    report = InvariantReport()
    if isinstance(g, BaseGadget):
        return report
    _classify(g, report, path=f"t={g.params.t}")
    return report


def _classify(g: RecursiveGadget, report: InvariantReport, path: str):
    half = g.params.half_bits
    mask = (1 << half) - 1
    epb = g.log.per_page
    lo, hi = g.flushed_range

    expected_top = Counter()
    expected_bottoms: Dict[int, Counter] = {}
    for index, e in enumerate(g.elements()):
        block = index // epb
        if block >= hi:
            report.tail += 1
        elif block >= lo:
            report.top += 1
            expected_top[(e.p, e.d >> half, e.s >> half, block)] += 1
        else:
            report.bottom += 1
            expected_bottoms.setdefault(e.d >> half, Counter())[(e.p, e.d & mask, e.s & mask, block)] += 1

    if hi * epb > len(g):
        report.violations.append(f"{path}: flushed range [{lo}, {hi}) reaches past the tail")
    if g.top_count != sum(expected_top.values()):
        report.violations.append(f"{path}: top_count={g.top_count}, expected {sum(expected_top.values())}")

    actual_top = Counter(tuple(e) for e in g.top.elements()) if g.top is not None else Counter()
    if actual_top != expected_top:
        report.violations.append(f"{path}: top holds {sum(actual_top.values())} elements "
                                 f"that differ from the {sum(expected_top.values())} expected")

    for high_d in sorted(set(expected_bottoms) | set(g.bottoms)):
        expected = expected_bottoms.get(high_d, Counter())
        bottom = g.bottoms.get(high_d)
        actual = Counter(tuple(e) for e in bottom.elements()) if bottom is not None else Counter()
        if actual != expected:
            report.violations.append(f"{path}: bottom {high_d} holds {sum(actual.values())} elements "
                                     f"that differ from the {sum(expected.values())} expected")

    # children report violations only; counts describe this level's log
    children = [(f"{path}/top", g.top)] + [(f"{path}/bottom{k}", g.bottoms[k]) for k in sorted(g.bottoms)]
    for child_path, child in children:
        if isinstance(child, RecursiveGadget):
            child_report = InvariantReport()
            _classify(child, child_report, child_path)
            report.violations.extend(child_report.violations)
