"""
Hashing - k-independent polynomial hashes and gadget field splitting
"""

from .poly_hash import (
    MERSENNE_61,
    PolyHash,
    HashedKey,
    SeedStream,
    splitmix64,
    independence_for,
    eval_hash,
    shrink_key,
    split_fields,
    partition_hash,
    high_half,
    low_half,
)

__all__ = [
    'MERSENNE_61',
    'PolyHash',
    'HashedKey',
    'SeedStream',
    'splitmix64',
    'independence_for',
    'eval_hash',
    'shrink_key',
    'split_fields',
    'partition_hash',
    'high_half',
    'low_half',
]
