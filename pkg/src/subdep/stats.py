"""Moment statistics used as comparison baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SummaryStats:
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov: float
    n: int


def summary_stats(x, y) -> SummaryStats:
    """Means, variances and covariance with denominator n (two passes)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if x.size == 0:
        raise ValueError("empty sample")
    mx, my = x.mean(), y.mean()
    dx, dy = x - mx, y - my
    return SummaryStats(float(mx), float(my), float(np.mean(dx * dx)), float(np.mean(dy * dy)),
                        float(np.mean(dx * dy)), int(x.size))


def pearson_sample(x, y) -> float:
    """Product-moment correlation; ``nan`` when either variable is constant."""
    s = summary_stats(x, y)
    if s.n < 2 or s.var_x == 0 or s.var_y == 0:
        return math.nan
    r = s.cov / math.sqrt(s.var_x * s.var_y)
    return max(-1.0, min(1.0, r))
