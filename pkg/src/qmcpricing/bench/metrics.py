from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


def rmse(estimates, truths) -> float:
    """sqrt(mean((estimate - truth)^2))."""
    est = np.asarray(estimates, dtype=np.float64).ravel()
    tru = np.asarray(truths, dtype=np.float64).ravel()
    if est.size != tru.size:
        raise ValueError(f"{est.size} estimates for {tru.size} reference values")
    if est.size == 0:
        raise ValueError("rmse of an empty list")
    err = est - tru
    return math.sqrt(math.fsum((err * err).tolist()) / err.size)


def mc_rmse_curve(rmse_at_ref: float, n_ref: int, n_grid) -> list[tuple[int, float]]:
    """Extrapolate an MC RMSE measured at ``n_ref`` with the n^-1/2 law."""
    return [(int(n), rmse_at_ref * math.sqrt(n_ref / n)) for n in n_grid]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    points: int


def fit_slope(rows) -> SlopeFit:
    """Least-squares line through (log n, log rmse)."""
    rows = [(float(n), float(e)) for n, e in rows]
    usable = [(n, e) for n, e in rows if n > 0 and e > 0]
    if len(usable) < len(rows):
        warnings.warn(f"fit_slope: dropped {len(rows) - len(usable)} non-positive row(s)", RuntimeWarning,
                      stacklevel=2)
    if len(usable) < 3:
        raise ValueError(f"fit_slope needs at least 3 positive rows, got {len(usable)}")
    x = np.log([n for n, _ in usable])
    y = np.log([e for _, e in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), r2, len(usable))
