"""Small statistics helpers: binomial intervals and log-log fits."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

Z95 = 1.959963984540054


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo, hi = max(0.0, center - half), min(1.0, center + half)
    # guard against rounding pushing the point estimate outside
    return min(lo, phat), max(hi, phat)


def loglog_slope(
    x: Sequence[float], y: Sequence[float], weights: Sequence[float] | None = None
) -> tuple[float, float]:
    """Weighted least-squares slope of log y against log x and its standard error.

    ``weights`` are inverse variances of log y; without them the residual
    scatter sets the error.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if weights is None:
        w = np.ones_like(lx)
    else:
        w = np.asarray(weights, dtype=float)
    xm = np.sum(w * lx) / np.sum(w)
    ym = np.sum(w * ly) / np.sum(w)
    sxx = np.sum(w * (lx - xm) ** 2)
    slope = np.sum(w * (lx - xm) * (ly - ym)) / sxx
    if weights is None:
        dof = max(len(lx) - 2, 1)
        resid = ly - ym - slope * (lx - xm)
        se = math.sqrt(np.sum(resid**2) / dof / sxx)
    else:
        se = math.sqrt(1.0 / sxx)
    return float(slope), float(se)
