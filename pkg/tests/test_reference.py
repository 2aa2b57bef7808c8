import random

import pytest

from src.reference import BaselineBufferTree, DELETE, INSERT, LOOKUP, Op, OracleMap, scramble
from src.utils.errors import BadParameters


class TestOracleMap:
    def test_last_write_wins(self):
        oracle = OracleMap()
        oracle.insert(1, 10)
        oracle.insert(1, 11)
        assert oracle.lookup(1) == 11

    def test_delete_and_absent(self):
        oracle = OracleMap()
        oracle.insert(1, 10)
        oracle.delete(1)
        oracle.delete(2)
        assert oracle.lookup(1) is None
        assert oracle.lookup(3) is None
        assert len(oracle) == 0

    def test_apply(self):
        oracle = OracleMap()
        assert oracle.apply(Op(INSERT, 5, 50)) is None
        assert oracle.apply(Op(LOOKUP, 5)) == 50
        oracle.apply(Op(DELETE, 5))
        assert oracle.apply(Op(LOOKUP, 5)) is None
        assert oracle.ops == 4

    def test_apply_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            OracleMap().apply(Op('upsert', 1))

    def test_live_keys(self):
        oracle = OracleMap()
        for key in range(5):
            oracle.insert(key, key)
        oracle.delete(2)
        assert sorted(oracle.live_keys()) == [0, 1, 3, 4]
        assert len(oracle) == 4


def test_scramble_is_injective_on_a_sample():
    assert len({scramble(key) for key in range(10000)}) == 10000


class TestBaselineBufferTree:
    def tree(self, fanout=4, n_max=4096):
        return BaselineBufferTree(n_max=n_max, page_words=16, word_bits=32, fanout=fanout)

    @pytest.mark.parametrize('fanout', [1, 17])
    def test_fanout_outside_range(self, fanout):
        with pytest.raises(BadParameters):
            self.tree(fanout=fanout)

    def test_depth_covers_n_max(self):
        tree = self.tree(fanout=4)
        assert tree.per_page == 5
        assert tree.fanout ** tree.depth * tree.per_page >= 4096
        assert tree.fanout ** (tree.depth - 1) * tree.per_page < 4096

    def test_basic_semantics(self):
        tree = self.tree()
        assert tree.lookup(7) is None
        tree.insert(7, 70)
        tree.insert(7, 71)
        assert tree.lookup(7) == 71
        tree.delete(7)
        assert tree.lookup(7) is None

    @pytest.mark.parametrize('fanout', [2, 4, 16])
    def test_matches_oracle(self, fanout):
        tree = self.tree(fanout=fanout)
        oracle = OracleMap()
        rng = random.Random(fanout)
        for i in range(6000):
            key = rng.randrange(3000)
            roll = rng.randrange(100)
            if roll < 45:
                value = rng.getrandbits(64)
                tree.insert(key, value)
                oracle.insert(key, value)
            elif roll < 55:
                tree.delete(key)
                oracle.delete(key)
            else:
                assert tree.lookup(key) == oracle.lookup(key), f"op {i} key {key}"
        assert tree.flushes > 0

    def test_lookups_never_write(self):
        tree = self.tree()
        for key in range(1000):
            tree.insert(key, key)
        writes = tree.io_stats().writes
        for key in range(2000):
            tree.lookup(key)
        assert tree.io_stats().writes == writes

    def test_query_reads_fall_with_fanout(self):
        def mean_lookup_reads(fanout):
            tree = self.tree(fanout=fanout)
            for key in range(3000):
                tree.insert(key, key)
            before = tree.io_stats()
            for key in range(0, 3000, 6):
                tree.lookup(key)
            return (tree.io_stats() - before).reads / 500

        assert mean_lookup_reads(16) < mean_lookup_reads(2)
