"""
Gadgetdict - External-memory dictionary with recursive key compression

Hashing-based dictionary on a simulated paged memory with exact I/O accounting,
benchmarked against a classic buffer tree and an in-memory oracle.
"""

__version__ = '0.1.0'
