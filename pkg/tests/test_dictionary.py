import random
from math import log2

import pytest
from hypothesis import given, settings, strategies as st

from src.dictionary import (
    Dictionary, DictionaryConfig, derive_layout, derive_t_min, predict_baseline_costs, predict_costs,
)
from src.dictionary.dictionary import manifest_path
from src.reference import OracleMap
from src.utils.errors import BadParameters, DictionaryFull, PageFileError


def tiny_config(**overrides):
    fields = dict(n_max=64, page_words=16, word_bits=32, cache_words=1 << 13, lam=8, seed=3)
    fields.update(overrides)
    return DictionaryConfig(**fields)


class TestLayout:
    @pytest.mark.parametrize('lam,t_min', [(2, 2), (8, 4), (16, 4), (24, 8), (32, 8), (64, 16)])
    def test_t_min_from_lambda(self, lam, t_min):
        assert derive_t_min(lam) == t_min
        assert t_min * log2(t_min) <= lam

    def test_defaults(self):
        layout = derive_layout(DictionaryConfig())
        assert layout.b == 4096
        assert layout.shrink_bits == 40
        assert layout.m_keys == 1 << 16
        assert layout.chunk_bits == 8
        assert layout.gadget.t == 16
        assert layout.t_min == 4

    def test_small_config(self, small_config):
        layout = derive_layout(small_config)
        assert layout.b == 512
        assert layout.m_keys == 4096
        assert layout.gadget.t == 16
        assert not layout.gadget.is_base

    def test_explicit_t_min(self):
        assert derive_layout(DictionaryConfig(t_min=16, lam=64)).t_min == 16

    def test_routing_uses_top_chunks_then_a_partial_one(self):
        layout = derive_layout(tiny_config())
        # 12 shrink bits in chunks of 6
        assert layout.chunk_bits == 6
        h = 0b101010_010101
        assert layout.route(h, 0) == 0b101010
        assert layout.route(h, 1) == 0b010101
        assert layout.can_route(1)
        assert not layout.can_route(2)

    def test_lambda_above_b(self):
        with pytest.raises(BadParameters, match='exceeds B'):
            derive_layout(DictionaryConfig(lam=70))

    def test_lambda_below_floor(self):
        with pytest.raises(BadParameters, match='below'):
            derive_layout(DictionaryConfig(cache_words=4, lam=8))

    def test_pages_smaller_than_lg_n(self):
        with pytest.raises(BadParameters):
            derive_layout(DictionaryConfig(page_words=16, lam=16))


class TestCosts:
    def test_predict_costs_formula(self):
        t_u, t_q = predict_costs(1 << 20, 64, 1 << 10, 16)
        assert t_u == pytest.approx((2 + log2(10) + 16) / 64)
        assert t_q == pytest.approx(5.0)

    def test_predict_costs_rejects_lambda_above_b(self):
        with pytest.raises(BadParameters, match='lambda=70 exceeds B=64'):
            predict_costs(1 << 20, 64, 1 << 16, 70)

    def test_baseline_costs(self):
        t_u, t_q = predict_baseline_costs(1 << 20, 64, 8)
        assert t_u == pytest.approx(8 * 20 / 64)
        assert t_q == pytest.approx(20 / 3)

    def test_baseline_fanout_range(self):
        with pytest.raises(BadParameters):
            predict_baseline_costs(1 << 20, 64, 1)


class TestOperations:
    def test_empty_lookup(self, small_config):
        assert Dictionary(small_config).lookup(42) is None

    def test_insert_then_lookup(self, small_config):
        d = Dictionary(small_config)
        d.insert(42, 7)
        assert d.lookup(42) == 7

    def test_overwrite(self, small_config):
        d = Dictionary(small_config)
        d.insert(42, 1)
        d.insert(42, 2)
        assert d.lookup(42) == 2
        assert d.locate(42) == 1

    def test_delete(self, small_config):
        d = Dictionary(small_config)
        d.insert(42, 1)
        d.delete(42)
        assert d.lookup(42) is None
        d.delete(99)
        assert d.lookup(99) is None

    def test_reinsert_after_delete(self, small_config):
        d = Dictionary(small_config)
        d.insert(42, 1)
        d.delete(42)
        d.insert(42, 3)
        assert d.lookup(42) == 3

    def test_full_width_keys_and_values(self, small_config):
        d = Dictionary(small_config)
        d.insert(2**64 - 1, 2**64 - 1)
        d.insert(0, 0)
        assert d.lookup(2**64 - 1) == 2**64 - 1
        assert d.lookup(0) == 0

    def test_lookups_never_write(self, small_config):
        d = Dictionary(small_config)
        for key in range(500):
            d.insert(key, key * 3)
        writes = d.mem.writes
        for key in range(1000):
            assert d.lookup(key) == (key * 3 if key < 500 else None)
        assert d.mem.writes == writes

    def test_root_distribution(self):
        config = tiny_config(m_keys=130)
        d = Dictionary(config)
        assert d.pair_per_page == 26
        for key in range(130):
            d.insert(key, key)
        assert d.events.distributions == 1
        assert len(d.root) == 0
        assert sum(len(child) for child in d.root.children.values()) == 130
        d.insert(1000, 1)
        assert d.events.distributions == 1
        assert all(d.lookup(key) == key for key in range(130))
        assert d.check_mirror() == []

    def test_deletions_trigger_one_rebuild(self):
        d = Dictionary(tiny_config())
        for key in range(40):
            d.insert(key, key)
        for key in range(32):
            d.delete(key)
        assert d.rebuilds == 1
        assert d.deletions == 0
        assert len(d) == 8
        assert [d.lookup(k) for k in range(40)] == [None] * 32 + list(range(32, 40))

    def test_log_compaction(self):
        d = Dictionary(tiny_config())
        for round_ in range(5):
            for key in range(30):
                d.insert(key, round_)
        assert d.rebuilds >= 1
        assert len(d) < 128
        assert all(d.lookup(key) == 4 for key in range(30))

    def test_full(self):
        d = Dictionary(tiny_config())
        with pytest.raises(DictionaryFull):
            for key in range(200):
                d.insert(key, key)

    def test_full_rejects_the_first_key_past_n_max(self):
        d = Dictionary(tiny_config())
        for key in range(64):
            d.insert(key, key)
        with pytest.raises(DictionaryFull):
            d.insert(64, 64)
        log_length = len(d)
        with pytest.raises(DictionaryFull):
            d.insert(65, 65)
        assert len(d) == log_length
        assert d.lookup(64) is None
        assert [d.lookup(k) for k in range(64)] == list(range(64))

    def test_full_still_accepts_overwrites_and_deletes(self):
        d = Dictionary(tiny_config())
        for key in range(64):
            d.insert(key, key)
        d.insert(5, 500)
        assert d.lookup(5) == 500
        d.delete(7)
        d.insert(100, 100)
        assert d.lookup(100) == 100
        with pytest.raises(DictionaryFull):
            d.insert(101, 101)

    def test_tiny_n_max_is_enforced(self):
        d = Dictionary(tiny_config(n_max=2))
        d.insert(1, 1)
        d.insert(2, 2)
        with pytest.raises(DictionaryFull):
            d.insert(3, 3)
        d.insert(2, 20)
        assert [d.lookup(k) for k in (1, 2, 3)] == [1, 20, None]

    def test_overwrites_never_count_as_new_keys(self):
        d = Dictionary(tiny_config())
        for round_ in range(10):
            for key in range(60):
                d.insert(key, round_)
        assert all(d.lookup(key) == 9 for key in range(60))

    def test_rebuild_empty(self, small_config):
        d = Dictionary(small_config)
        d.rebuild()
        assert d.rebuilds == 1
        assert len(d) == 0
        assert d.lookup(1) is None

    def test_rebuild_preserves_live_set(self, small_config):
        d = Dictionary(small_config)
        rng = random.Random(5)
        oracle = OracleMap()
        for _ in range(3000):
            key = rng.randrange(1500)
            if rng.random() < 0.8:
                value = rng.getrandbits(64)
                d.insert(key, value)
                oracle.insert(key, value)
            else:
                d.delete(key)
                oracle.delete(key)
        d.rebuild()
        assert d.deletions == 0
        assert len(d) == len(oracle)
        assert all(d.lookup(key) == oracle.lookup(key) for key in range(1500))

    def test_shrink_collisions_are_filtered(self):
        d = Dictionary(tiny_config(n_max=16))
        for key in range(16):
            d.insert(key * 7919, key)
        for key in range(16):
            assert d.lookup(key * 7919) == key
        for key in range(1, 400):
            assert d.lookup(-key % 2**64) is None
        assert d.stats().shrink_false_positives > 0


class TestOracleEquivalence:
    def test_mixed_workload_with_distribution_and_compaction(self, small_config):
        d = Dictionary(small_config)
        oracle = OracleMap()
        rng = random.Random(11)
        live = []
        for i in range(15000):
            roll = rng.randrange(100)
            if roll < 45:
                key = rng.randrange(2 * small_config.n_max)
                if oracle.lookup(key) is None and len(oracle) >= small_config.n_max and live:
                    key = rng.choice(live)
                value = rng.getrandbits(64)
                d.insert(key, value)
                oracle.insert(key, value)
                live.append(key)
            elif roll < 55:
                key = rng.choice(live) if live else rng.randrange(2 * small_config.n_max)
                d.delete(key)
                oracle.delete(key)
            else:
                key = rng.choice(live) if live and rng.random() < 0.5 else rng.randrange(2 * small_config.n_max)
                assert d.lookup(key) == oracle.lookup(key), f"op {i} key {key}"
        stats = d.stats()
        assert stats.distributions >= 1
        assert stats.rebuilds >= 1
        assert stats.distribution_violations == 0
        assert d.check_mirror() == []

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from(['insert', 'delete', 'lookup']),
                              st.integers(0, 39), st.integers(0, 2**64 - 1)), max_size=300))
    def test_random_sequences(self, ops):
        d = Dictionary(tiny_config(m_keys=52, debug=True))
        oracle = OracleMap()
        for kind, key, value in ops:
            if kind == 'insert':
                d.insert(key, value)
                oracle.insert(key, value)
            elif kind == 'delete':
                d.delete(key)
                oracle.delete(key)
            else:
                assert d.lookup(key) == oracle.lookup(key)
        assert all(d.lookup(key) == oracle.lookup(key) for key in range(40))


class TestInspection:
    def test_stats_shape(self):
        d = Dictionary(tiny_config(m_keys=52))
        for key in range(60):
            d.insert(key, key)
        stats = d.stats()
        assert stats.log_length == 60
        assert stats.nodes > 1
        assert stats.depth == 1
        assert stats.pages_in_use == d.mem.pages_in_use()

    def test_mirror_holds_and_is_uncounted(self, small_config):
        d = Dictionary(small_config)
        for key in range(5000):
            d.insert(key, key)
        before = d.io_stats()
        assert d.check_mirror() == []
        assert d.io_stats() == before

    def test_space_is_linear(self, small_config):
        d = Dictionary(small_config)
        for key in range(4000):
            d.insert(key, key)
        assert d.mem.pages_in_use() <= 8 * 4000 * 128 / 512


class TestPersistence:
    def test_save_and_load(self, small_config, tmp_path):
        d = Dictionary(small_config)
        for key in range(300):
            d.insert(key, key + 1)
        for key in range(0, 300, 3):
            d.delete(key)
        d.insert(7, 777)

        page_file = tmp_path / 'dict.empg'
        manifest = d.save(page_file)
        assert manifest == manifest_path(page_file)
        lines = manifest.read_text().splitlines()
        assert 'lam=8' in lines
        assert any(line.startswith('log_root=') for line in lines)

        loaded = Dictionary.load(page_file)
        assert loaded.config == small_config
        assert len(loaded) == len(d)
        assert all(loaded.lookup(key) == d.lookup(key) for key in range(310))

    def test_load_without_manifest(self, tmp_path):
        with pytest.raises(PageFileError):
            Dictionary.load(tmp_path / 'missing.empg')


@pytest.mark.slow
def test_false_positives_per_lookup_stay_below_one():
    d = Dictionary(DictionaryConfig(n_max=1 << 14, seed=5))
    rng = random.Random(5)
    keys = [rng.getrandbits(64) for _ in range(1 << 14)]
    for i, key in enumerate(keys):
        d.insert(key, i)
    for i in range(0, 1 << 14, 8):
        assert d.lookup(keys[i]) == i
    for _ in range(2048):
        d.lookup(rng.getrandbits(64))
    stats = d.stats()
    assert stats.gadget_false_positives / stats.lookups <= 1.0
    assert stats.distribution_violations == 0
    histogram = d.ledger.base_query_pages()
    assert sum(n for pages, n in histogram.items() if pages <= 2) >= 0.99 * sum(histogram.values())
