"""
Polynomial Hashing - k-independent hashes over the Mersenne prime 2^61 - 1

One evaluation yields up to 60 usable bits. The dictionary slices them into
the page / distribution / shadow fields that address a gadget, and reduces
them modulo n^2 for key shrinkage.
"""

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Tuple

from ..utils.bits import ceil_lg, exact_lg
from ..utils.errors import BadParameters

MERSENNE_61 = (1 << 61) - 1
MASK_64 = (1 << 64) - 1
USABLE_BITS = 60

GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> Tuple[int, int]:
    """
    One splitmix64 step

    Returns:
        (next state, 64-bit output)
    """
    state = (state + GOLDEN_GAMMA) & MASK_64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return state, z ^ (z >> 31)


class SeedStream:
    """Reproducible stream of 64-bit seeds derived from one run seed"""

    def __init__(self, seed: int):
        self._state = seed & MASK_64

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        self._state, out = splitmix64(self._state)
        return out


class HashedKey(NamedTuple):
    """Gadget address: page hash p in [b], distribution hash d in [t], shadow hash s in [t]"""
    p: int
    d: int
    s: int


def independence_for(n: int) -> int:
    """Independence degree used for a structure sized for n keys: 2 * ceil(lg n)"""
    return max(2, 2 * ceil_lg(n))


@dataclass(frozen=True)
class PolyHash:
    """Degree-(k-1) polynomial with coefficients expanded from a seed by splitmix64"""
    k: int
    seed: int
    coefficients: Tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise BadParameters(f"independence k={self.k} must be at least 1")
        state = self.seed & MASK_64
        coefficients = []
        for _ in range(self.k):
            state, out = splitmix64(state)
            coefficients.append(out % MERSENNE_61)
        object.__setattr__(self, 'coefficients', tuple(coefficients))

    @classmethod
    def for_n(cls, n: int, seed: int) -> 'PolyHash':
        return cls(k=independence_for(n), seed=seed)

    def __call__(self, key: int) -> int:
        return eval_hash(self, key)


def eval_hash(h: PolyHash, key: int) -> int:
    """sum(c_i * key^i) mod (2^61 - 1), by Horner's rule"""
    x = key % MERSENNE_61
    acc = 0
    for c in reversed(h.coefficients):
        acc = (acc * x + c) % MERSENNE_61
    return acc


def shrink_key(h: PolyHash, key: int, n: int) -> int:
    """Hash a word-sized key into [n^2] (2 lg n bits)"""
    lg_n = exact_lg(n, 'n')
    if 2 * lg_n > USABLE_BITS:
        raise BadParameters(f"n=2^{lg_n} needs {2 * lg_n} hash bits, only {USABLE_BITS} available")
    return eval_hash(h, key) & ((1 << (2 * lg_n)) - 1)


def split_fields(value: int, b: int, t: int) -> HashedKey:
    """
    Slice the low (lg b + 2 lg t) bits of value into (p, d, s)

    p takes the most significant lg b of those bits, d the next lg t, s the last lg t.
    """
    lg_b = exact_lg(b, 'b')
    lg_t = exact_lg(t, 't')
    if lg_b + 2 * lg_t > USABLE_BITS:
        raise BadParameters(f"lg b + 2 lg t = {lg_b + 2 * lg_t} exceeds {USABLE_BITS} hash bits")
    t_mask = t - 1
    return HashedKey(
        (value >> (2 * lg_t)) & (b - 1),
        (value >> lg_t) & t_mask,
        value & t_mask,
    )


def partition_hash(h: PolyHash, key: int, b: int, t: int) -> HashedKey:
    """Hash key and split the result into page, distribution and shadow fields"""
    return split_fields(eval_hash(h, key), b, t)


def half_bits(t: int) -> int:
    lg_t = exact_lg(t, 't')
    if lg_t % 2:
        raise BadParameters(f"t={t} has odd lg t, cannot split into halves")
    return lg_t // 2


def high_half(x: int, t: int) -> int:
    """Most significant half of the lg t bits of x"""
    return x >> half_bits(t)


def low_half(x: int, t: int) -> int:
    """Least significant half of the lg t bits of x"""
    return x & ((1 << half_bits(t)) - 1)
