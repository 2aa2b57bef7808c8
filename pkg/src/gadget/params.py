"""
Gadget parameters, element layout and instrumentation records
"""

from collections import Counter
from dataclasses import dataclass, field, replace
from math import isqrt
from typing import Dict, NamedTuple, Tuple

from ..hashing import HashedKey
from ..utils.bits import is_power_of_two, exact_lg
from ..utils.errors import BadParameters

CHILD_SLACK = 2


class GadgetElement(NamedTuple):
    """A hashed key (p, d, s) plus its backpointer"""
    p: int
    d: int
    s: int
    backpointer: int

    @property
    def key(self) -> HashedKey:
        return HashedKey(self.p, self.d, self.s)


def pad_to_ladder(t: int, t_min: int) -> int:
    """
    Round t up so that lg t = 2^j * lg t_min for some j >= 0

    Every level of the recursion then halves the distribution and shadow
    fields exactly, down to t_min.
    """
    lg_min = exact_lg(t_min, 't_min')
    if lg_min < 1:
        raise BadParameters(f"t_min={t_min} must be at least 2")
    lg = lg_min
    while (1 << lg) < t:
        lg *= 2
    return 1 << lg


def ladder(t: int, t_min: int) -> Tuple[int, ...]:
    """The t values of every recursion level, outermost first"""
    t = pad_to_ladder(t, t_min)
    levels = [t]
    while t > t_min:
        t = isqrt(t)
        levels.append(t)
    return tuple(levels)


@dataclass(frozen=True)
class GadgetParams:
    """
    Shape of one t-gadget

    backptr_bits is the width of the backpointer field. At the outermost level
    it holds associated data (the global log index); below that, a block index
    of the parent's log. slack scales the overflow limit but not the layout:
    a child gadget may hold slack times its share of a full parent.
    """
    t: int
    t_min: int
    b: int
    backptr_bits: int
    c_cap: int = 2
    slack: int = 1

    def __post_init__(self):
        if not is_power_of_two(self.b):
            raise BadParameters(f"b={self.b} is not a power of two")
        if self.t_min < 2 or not is_power_of_two(self.t_min):
            raise BadParameters(f"t_min={self.t_min} must be a power of two >= 2")
        if pad_to_ladder(self.t, self.t_min) != self.t:
            raise BadParameters(f"t={self.t} is not on the ladder of t_min={self.t_min}")
        if self.backptr_bits < 1:
            raise BadParameters(f"backptr_bits={self.backptr_bits} must be positive")
        if self.c_cap < 1 or self.slack < 1:
            raise BadParameters(f"c_cap={self.c_cap} and slack={self.slack} must be positive")
        if self.elem_bits > self.b:
            raise BadParameters(f"element of {self.elem_bits} bits does not fit a {self.b}-bit page")

    @classmethod
    def padded(cls, t: int, t_min: int, b: int, backptr_bits: int, c_cap: int = 2) -> 'GadgetParams':
        """Params with t rounded up the ladder"""
        return cls(pad_to_ladder(max(t, 1), t_min), t_min, b, backptr_bits, c_cap)

    @property
    def lg_t(self) -> int:
        return self.t.bit_length() - 1

    @property
    def lg_b(self) -> int:
        return self.b.bit_length() - 1

    @property
    def is_base(self) -> bool:
        return self.t <= self.t_min

    @property
    def half_bits(self) -> int:
        return self.lg_t // 2

    @property
    def sqrt_t(self) -> int:
        return 1 << self.half_bits

    @property
    def widths(self) -> Tuple[int, int, int, int]:
        """Field widths of a packed element: p, d, s, backpointer"""
        return (self.lg_b, self.lg_t, self.lg_t, self.backptr_bits)

    @property
    def elem_bits(self) -> int:
        return self.lg_b + 2 * self.lg_t + self.backptr_bits

    @property
    def elems_per_block(self) -> int:
        return self.b // self.elem_bits

    @property
    def nominal_capacity(self) -> int:
        """c_cap * b * t: the load the base table is sized for"""
        return self.c_cap * self.b * self.t

    @property
    def capacity(self) -> int:
        return self.slack * self.nominal_capacity

    @property
    def top_capacity(self) -> int:
        """b * sqrt(t): a top gadget this full is declared full and big-flushed"""
        return self.b * self.sqrt_t

    @property
    def max_log_blocks(self) -> int:
        return -(-self.capacity // self.elems_per_block)

    @property
    def query_visits(self) -> int:
        """Gadgets one query visits: 1 + 2 * Q(sqrt(t)), 1 at the base"""
        if self.is_base:
            return 1
        return 1 + 2 * replace(self, t=self.sqrt_t).query_visits

    def child(self) -> 'GadgetParams':
        """
        Params of the top and bottom sqrt(t)-gadgets

        Children keep c_cap. A bottom of a full parent expects c_cap * b * sqrt(t)
        elements; CHILD_SLACK lets it take up to twice that before overflowing.
        """
        if self.is_base:
            raise BadParameters(f"t={self.t} is a base gadget and has no children")
        blocks = self.max_log_blocks
        if blocks > self.t ** 3:
            raise BadParameters(f"log of {blocks} blocks exceeds the backpointer range t^3={self.t ** 3}")
        return replace(self, t=self.sqrt_t, backptr_bits=max(1, (blocks - 1).bit_length()),
                       slack=CHILD_SLACK)


@dataclass
class QueryTrace:
    """Per-query instrumentation, filled in as the query recurses"""
    visits: int = 0
    false_positives: int = 0
    distribution_violations: int = 0


@dataclass
class LevelCounters:
    """Lifetime counters for all gadget instances at one recursion level"""
    little_flushes: int = 0
    big_flushes: int = 0
    base_flushes: int = 0
    elements_written: int = 0
    bits_written: int = 0
    false_positives: int = 0
    distribution_violations: int = 0
    base_query_pages: Counter = field(default_factory=Counter)


class GadgetLedger:
    """Per-level counters shared by one gadget hierarchy; outlives destroyed top gadgets"""

    def __init__(self):
        self.levels: Dict[int, LevelCounters] = {}

    def level(self, t: int) -> LevelCounters:
        counters = self.levels.get(t)
        if counters is None:
            counters = self.levels[t] = LevelCounters()
        return counters

    def total(self, attr: str) -> int:
        return sum(getattr(c, attr) for c in self.levels.values())

    def base_query_pages(self) -> Counter:
        merged = Counter()
        for counters in self.levels.values():
            merged.update(counters.base_query_pages)
        return merged
