"""
Bit arithmetic helpers shared by hashing, gadgets and the dictionary
"""

from .errors import BadParameters


def is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def ceil_lg(x: int) -> int:
    """Smallest k with 2**k >= x (0 for x <= 1)"""
    return (x - 1).bit_length() if x > 1 else 0


def exact_lg(x: int, name: str = 'value') -> int:
    """lg x for a power of two, else BadParameters"""
    if not is_power_of_two(x):
        raise BadParameters(f"{name}={x} is not a power of two")
    return x.bit_length() - 1


def next_power_of_two(x: int) -> int:
    return 1 << ceil_lg(x)
