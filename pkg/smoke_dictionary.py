#!/usr/bin/env python3
"""
Smoke test the dictionary on a small workload

Quick check that insert, overwrite, delete, lookup, rebuild and save/load
all work before running the full benchmark harness.
"""

import logging
import random
import sys
import tempfile
from pathlib import Path

from src.dictionary import Dictionary, DictionaryConfig
from src.reference import OracleMap

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def main() -> int:
    config = DictionaryConfig(n_max=1 << 12, page_words=16, word_bits=32, cache_words=1 << 13, lam=8, seed=1)
    dictionary = Dictionary(config)
    oracle = OracleMap()
    rng = random.Random(1)

    print("\n" + "=" * 60)
    print("Smoke Testing Gadgetdict")
    print("=" * 60)
    print(f"\nn_max: {config.n_max}")
    print(f"Page: {config.page_words} words x {config.word_bits} bits")
    print(f"Cache: {config.cache_words} words")
    print(f"lambda: {config.lam}")

    print("\n" + "-" * 60)
    print("Running 6000 mixed operations...")
    print("-" * 60 + "\n")

    mismatches = 0
    for _ in range(6000):
        key = rng.randrange(2 * config.n_max)
        roll = rng.random()
        if roll < 0.45:
            value = rng.getrandbits(64)
            dictionary.insert(key, value)
            oracle.insert(key, value)
        elif roll < 0.55:
            dictionary.delete(key)
            oracle.delete(key)
        elif dictionary.lookup(key) != oracle.lookup(key):
            mismatches += 1

    dictionary.rebuild()
    mismatches += sum(1 for key in oracle.live_keys() if dictionary.lookup(key) != oracle.lookup(key))

    with tempfile.TemporaryDirectory() as tmp:
        page_file = Path(tmp) / 'smoke.empg'
        dictionary.save(page_file)
        loaded = Dictionary.load(page_file)
        mismatches += sum(1 for key in oracle.live_keys() if loaded.lookup(key) != oracle.lookup(key))

    stats = dictionary.stats()
    io = dictionary.io_stats()

    print("\n" + "=" * 60)
    if mismatches == 0:
        print("✅ SMOKE TEST PASSED!")
        print(f"\nLive keys: {len(oracle)}")
        print(f"  Nodes: {stats.nodes} (depth {stats.depth})")
        print(f"  Rebuilds: {stats.rebuilds}, distributions: {stats.distributions}")
        print(f"  I/O: {io.reads} reads, {io.writes} writes, {stats.pages_in_use} pages in use")
    else:
        print("❌ SMOKE TEST FAILED!")
        print(f"\n{mismatches} lookups disagreed with the oracle")
    print("=" * 60)

    print("\n💡 Next steps:")
    if mismatches == 0:
        print("  1. Run 'python3 -m src.bench verify --ops 100000' for a full oracle check")
        print("  2. Run 'python3 -m src.bench sweep --lambdas 8,16,32,64 > sweep.csv' for cost curves")
    else:
        print("  Rerun with debug=True in the config to check node mirrors after every change")
    return 0 if mismatches == 0 else 1


if __name__ == '__main__':
    sys.exit(main())
