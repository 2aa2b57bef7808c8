import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from src.hashing import (
    MERSENNE_61, HashedKey, PolyHash, SeedStream, eval_hash, high_half, independence_for,
    low_half, partition_hash, shrink_key, split_fields, splitmix64,
)
from src.utils.errors import BadParameters

M64 = (1 << 64) - 1


def reference_splitmix(seed, count):
    """Independent splitmix64 written from the published constants"""
    out = []
    x = seed
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) % (1 << 64)
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % (1 << 64)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % (1 << 64)
        out.append(z ^ (z >> 31))
    return out


def reference_eval(seed, k, key):
    """Term-by-term polynomial evaluation with Python big integers"""
    coefficients = [c % MERSENNE_61 for c in reference_splitmix(seed, k)]
    return sum(c * pow(key, i) for i, c in enumerate(coefficients)) % MERSENNE_61


def test_splitmix_known_vector():
    # first output for seed 0 in the reference implementation
    assert splitmix64(0)[1] == 0xE220A8397B1DCDAF


def test_seed_stream_is_reproducible():
    a = SeedStream(42)
    b = SeedStream(42)
    assert [next(a) for _ in range(5)] == [next(b) for _ in range(5)]
    assert [next(SeedStream(42)) for _ in range(1)] != [next(SeedStream(43))]


@pytest.mark.parametrize('seed,k,key', [
    (1, 2, 0),
    (1, 2, 12345),
    (7, 40, 2**63 + 11),
    (99, 8, MERSENNE_61 + 5),
    (2**64 - 1, 3, 2**61 - 2),
])
def test_eval_matches_reference(seed, k, key):
    assert eval_hash(PolyHash(k=k, seed=seed), key) == reference_eval(seed, k, key)


@given(st.integers(0, M64), st.integers(1, 12), st.integers(0, M64))
def test_eval_matches_reference_everywhere(seed, k, key):
    assert eval_hash(PolyHash(k=k, seed=seed), key) == reference_eval(seed, k, key)


def test_independence_for():
    assert independence_for(1 << 20) == 40
    assert independence_for(1000) == 20
    assert independence_for(1) == 2


def test_shrink_key_range_and_determinism():
    h = PolyHash.for_n(1 << 10, seed=3)
    values = [shrink_key(h, key, 1 << 10) for key in range(1000)]
    assert all(0 <= v < 1 << 20 for v in values)
    assert values == [shrink_key(h, key, 1 << 10) for key in range(1000)]


def test_shrink_key_single_slot():
    assert shrink_key(PolyHash(k=2, seed=5), 77, 1) == 0


def test_shrink_key_rejects_non_power_of_two():
    with pytest.raises(BadParameters):
        shrink_key(PolyHash(k=2, seed=5), 77, 1000)


def test_split_fields_all_ones():
    assert split_fields((1 << 28) - 1, 4096, 256) == HashedKey(4095, 255, 255)


def test_split_fields_layout():
    # p = 0b101, d = 0b10, s = 0b01 with b = 8, t = 4
    assert split_fields(0b101_10_01, 8, 4) == HashedKey(0b101, 0b10, 0b01)


def test_split_fields_ignores_high_bits():
    assert split_fields((1 << 59) | 0b101_10_01, 8, 4) == HashedKey(0b101, 0b10, 0b01)


def test_split_fields_too_wide():
    with pytest.raises(BadParameters):
        split_fields(0, 1 << 20, 1 << 21)


@given(st.integers(0, 255))
def test_halves_recombine(x):
    assert (high_half(x, 256) << 4) | low_half(x, 256) == x


def test_odd_lg_t_has_no_halves():
    with pytest.raises(BadParameters):
        high_half(3, 8)


def test_partition_hash_fields_in_range():
    h = PolyHash(k=8, seed=11)
    for key in range(200):
        p, d, s = partition_hash(h, key, 4096, 256)
        assert 0 <= p < 4096 and 0 <= d < 256 and 0 <= s < 256


@pytest.mark.parametrize('field,buckets', [(0, 64), (1, 16), (2, 16)])
def test_fields_are_uniform(field, buckets):
    """Chi-square over 20000 consecutive keys at significance 0.001"""
    h = PolyHash(k=16, seed=2024)
    counts = [0] * buckets
    for key in range(20000):
        value = partition_hash(h, key, 64, 16)[field]
        counts[value % buckets] += 1
    assert chisquare(counts).pvalue > 0.001


def bit_slice(value, b, t):
    """(p, d, s) read off the binary string of the low lg b + 2 lg t bits"""
    lg_b, lg_t = b.bit_length() - 1, t.bit_length() - 1
    width = lg_b + 2 * lg_t
    bits = format(value % (1 << width), f'0{width}b')
    return int(bits[:lg_b], 2), int(bits[lg_b:lg_b + lg_t], 2), int(bits[lg_b + lg_t:], 2)


def test_partition_hash_golden_value():
    value = reference_eval(7, 8, 123)
    assert value == 1198542907244069245
    assert bit_slice(value, 4096, 256) == (2648, 193, 125)
    assert partition_hash(PolyHash(k=8, seed=7), 123, 4096, 256) == HashedKey(2648, 193, 125)


def test_four_keys_are_jointly_uniform_over_seeds():
    """k=4: the top two bits of four fixed keys' hashes, over 20000 seeds, fill 256 cells evenly"""
    keys = (3, 1000, 2**40 + 7, 2**63 - 25)
    stream = SeedStream(99)
    counts = [0] * 256
    for _ in range(20_000):
        h = PolyHash(k=4, seed=next(stream))
        cell = 0
        for key in keys:
            cell = cell * 4 + eval_hash(h, key) * 4 // MERSENNE_61
        counts[cell] += 1
    assert chisquare(counts).pvalue > 0.001


def test_low_half_is_balanced_within_each_prefix():
    """For every high half of d, the low half is uniform over 10^5 keys"""
    h = PolyHash(k=16, seed=31)
    counts = [[0] * 16 for _ in range(16)]
    for key in range(100_000):
        d = partition_hash(h, key, 64, 256).d
        counts[high_half(d, 256)][low_half(d, 256)] += 1
    for row in counts:
        assert chisquare(row).pvalue > 0.001 / 16


@pytest.mark.parametrize('lg_n', [8, 16])
def test_shrink_collisions_match_birthday_count(lg_n):
    """Colliding pairs among 10^4 shrunk keys stay within 3 sigma of C(10^4, 2) / n^2"""
    n = 1 << lg_n
    h = PolyHash.for_n(n, seed=17)
    seen = {}
    for key in range(10_000):
        v = shrink_key(h, key * 2654435761 + 1, n)
        seen[v] = seen.get(v, 0) + 1
    pairs = sum(c * (c - 1) // 2 for c in seen.values())
    mean = 10_000 * 9_999 / 2 / n ** 2
    assert abs(pairs - mean) <= 3 * mean ** 0.5
