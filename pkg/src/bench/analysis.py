"""
Trend fits for sweep results
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class OriginFit:
    """y = slope * x, with the coefficient of determination of that fit"""
    slope: float
    r_squared: float
    points: int


def fit_through_origin(xs: Sequence[float], ys: Sequence[float]) -> OriginFit:
    """
    Least-squares fit of y = C * x

    Args:
        xs: Predictor values (for example lambda / B)
        ys: Measured values

    Returns:
        OriginFit with C and R^2 (R^2 against the mean of ys)
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise ValueError(f"need equal, non-empty samples, got {x.size} and {y.size}")

    coef, *_ = np.linalg.lstsq(x[:, None], y, rcond=None)
    slope = float(coef[0])
    resid = y - slope * x
    sse = float(np.sum(resid ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst > 0:
        r_squared = 1.0 - sse / sst
    else:
        r_squared = 1.0 if sse == 0 else 0.0
    return OriginFit(slope=slope, r_squared=r_squared, points=int(x.size))
