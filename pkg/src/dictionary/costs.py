"""
Predicted I/O costs with unit constants, for comparison against measurements
"""

from math import log2
from typing import Tuple

from ..utils.errors import BadParameters


def lambda_floor(n: int, cache_words: int) -> float:
    """max(lg lg n, log_M n), the smallest admissible lambda"""
    lg_n = log2(max(n, 2))
    return max(log2(lg_n) if lg_n > 1 else 0.0, lg_n / log2(cache_words))


def check_lambda(n: int, page_words: int, cache_words: int, lam: float):
    """
    Raise BadParameters unless max(lg lg n, log_M n) <= lambda <= B
    """
    if cache_words < 2:
        raise BadParameters(f"M={cache_words} must be at least 2 words")
    if lam > page_words:
        raise BadParameters(f"lambda={lam} exceeds B={page_words}")
    floor = lambda_floor(n, cache_words)
    if lam < floor:
        raise BadParameters(f"lambda={lam} is below max(lg lg n, log_M n)={floor:.3f}")
    if lam < 2:
        raise BadParameters(f"lambda={lam} must be at least 2")


def predict_costs(n: int, page_words: int, cache_words: int, lam: float) -> Tuple[float, float]:
    """
    Update and query cost of the dictionary, unit constants

    t_u = (log_M n + lg lg M + lambda) / B and t_q = lg n / lg lambda.

    Raises:
        BadParameters: lambda is outside [max(lg lg n, log_M n), B]
    """
    check_lambda(n, page_words, cache_words, lam)
    lg_n = log2(n)
    lg_m = log2(cache_words)
    lg_lg_m = log2(lg_m) if lg_m > 1 else 0.0
    t_u = (lg_n / lg_m + lg_lg_m + lam) / page_words
    t_q = lg_n / log2(lam)
    return t_u, t_q


def predict_baseline_costs(n: int, page_words: int, fanout: int) -> Tuple[float, float]:
    """
    Buffer-tree costs with fan-out lambda_b, unit constants

    t_u = lambda_b * lg n / B and t_q = lg n / lg lambda_b.
    """
    if not 2 <= fanout <= page_words:
        raise BadParameters(f"fanout={fanout} is outside [2, B={page_words}]")
    lg_n = log2(n)
    return fanout * lg_n / page_words, lg_n / log2(fanout)
