"""Uniform -> normal -> Brownian path -> GBM transforms."""
from __future__ import annotations

import csv
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

__all__ = [
    "BridgePlan", "ClampWarning", "MarketModel", "NotPositiveDefinite", "PathBatch",
    "bb_ordering", "brownian_path", "cholesky", "clamp_count", "gbm_paths", "inv_norm_cdf",
    "terminal_basket_normals", "uniform_grid",
]

# Acklam's rational approximation, central and tail pieces.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425
_U_MIN = 2.0 ** -53
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)


class ClampWarning(RuntimeWarning):
    """Raised (as a warning) when inv_norm_cdf had to clamp 0 or 1."""


_clamped = [0]


def clamp_count() -> int:
    """Total number of inputs clamped by :func:`inv_norm_cdf` in this process."""
    return _clamped[0]


@njit(cache=True)
def _quantile_kernel(u, out):
    """Fill ``out`` with quantiles of ``u``; returns (#clamped, #invalid)."""
    clamped = 0
    invalid = 0
    for i in range(u.size):
        v = u[i]
        if not (0.0 <= v <= 1.0):
            invalid += 1
            out[i] = np.nan
            continue
        if v == 0.0 or v == 1.0:
            clamped += 1
            v = min(max(v, _U_MIN), 1.0 - _U_MIN)
        upper = v > 0.5
        # 1 - v is exact for v >= 0.5, so the two halves are exact mirrors.
        p = 1.0 - v if upper else v
        if p < _P_LOW:
            t = math.sqrt(-2.0 * math.log(p))
            num = ((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]
            den = (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
            x = num / den
        else:
            s = p - 0.5
            r = s * s
            num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * s
            den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
            x = num / den
        # Halley step against the exact lower-tail probability.
        pdf = math.exp(-0.5 * x * x) / _SQRT_2PI
        if pdf > 0.0:
            h = (0.5 * math.erfc(-x / _SQRT2) - p) / pdf
            x = x - h / (1.0 + 0.5 * x * h)
        out[i] = -x if upper else x
    return clamped, invalid


def inv_norm_cdf(u):
    """Standard normal quantile (Acklam's approximation plus one Halley step).

    Inputs of exactly 0 or 1 are clamped to 2**-53 and 1 - 2**-53 (and
    counted, see :func:`clamp_count`) instead of returning infinities.
    """
    scalar = np.ndim(u) == 0
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(u, dtype=np.float64)))
    out = np.empty_like(arr)
    clamped, invalid = _quantile_kernel(arr.reshape(-1), out.reshape(-1))
    if invalid:
        raise ValueError(f"inv_norm_cdf: {invalid} input(s) non-finite or outside [0, 1]")
    if clamped:
        _clamped[0] += clamped
        warnings.warn("inv_norm_cdf clamped inputs equal to 0 or 1", ClampWarning, stacklevel=2)
    return float(out[0]) if scalar else out


class NotPositiveDefinite(ValueError):
    def __init__(self, index, pivot):
        super().__init__(f"correlation matrix is not positive definite: pivot {index} = {pivot:.3g}")
        self.index = index
        self.pivot = pivot


def cholesky(rho) -> np.ndarray:
    """Lower-triangular L with L @ L.T == rho."""
    rho = np.asarray(rho, dtype=np.float64)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {rho.shape}")
    if not np.allclose(rho, rho.T, atol=1e-12, rtol=0.0):
        raise ValueError("correlation matrix is not symmetric")
    if not np.allclose(np.diag(rho), 1.0, atol=1e-12, rtol=0.0):
        raise ValueError("correlation matrix needs a unit diagonal")
    d = rho.shape[0]
    L = np.zeros_like(rho)
    for j in range(d):
        pivot = rho[j, j] - L[j, :j] @ L[j, :j]
        if pivot < 1e-12:
            raise NotPositiveDefinite(j, pivot)
        L[j, j] = math.sqrt(pivot)
        L[j + 1:, j] = (rho[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True)
class MarketModel:
    """Black-Scholes market: spot(s), rate, per-asset vols, correlation, monitoring grid."""

    spot: float | tuple[float, ...]
    rate: float
    vols: tuple[float, ...]
    corr: np.ndarray | None = None
    grid: tuple[float, ...] | None = None

    def __post_init__(self):
        vols = tuple(float(v) for v in np.atleast_1d(self.vols))
        object.__setattr__(self, "vols", vols)
        if any(v <= 0 for v in vols):
            raise ValueError("volatilities must be positive")
        spots = np.atleast_1d(np.asarray(self.spot, dtype=np.float64))
        if np.any(spots <= 0):
            raise ValueError("spot must be positive")
        if spots.size not in (1, len(vols)):
            raise ValueError(f"{spots.size} spots given for {len(vols)} assets")
        corr = np.eye(len(vols)) if self.corr is None else np.array(self.corr, dtype=np.float64)
        if corr.shape != (len(vols), len(vols)):
            raise ValueError(f"correlation shape {corr.shape} does not match {len(vols)} assets")
        corr.setflags(write=False)
        object.__setattr__(self, "corr", corr)
        if self.grid is not None:
            grid = tuple(float(t) for t in self.grid)
            if not grid or grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("monitoring grid must be positive and strictly increasing")
            object.__setattr__(self, "grid", grid)

    @property
    def d(self) -> int:
        return len(self.vols)

    @property
    def spots(self) -> np.ndarray:
        return np.broadcast_to(np.atleast_1d(np.asarray(self.spot, dtype=np.float64)), (self.d,))


def uniform_grid(maturity: float, m: int) -> tuple[float, ...]:
    """t_i = i * T / m, i = 1..m."""
    return tuple(maturity * i / m for i in range(1, m + 1))


def bb_ordering(m: int) -> list[int]:
    """Brownian-bridge fill order of grid indices 1..m: terminal first, then midpoints.

    >>> bb_ordering(8)
    [8, 4, 2, 6, 1, 3, 5, 7]
    """
    if m < 1:
        raise ValueError(f"grid size must be >= 1, got {m}")
    order = [m]
    queue = deque([(0, m)])
    while queue:
        lo, hi = queue.popleft()
        if hi - lo < 2:
            continue
        mid = (lo + hi) // 2
        order.append(mid)
        queue.append((lo, mid))
        queue.append((mid, hi))
    return order


@dataclass(frozen=True)
class BridgePlan:
    """Precomputed conditional-mean weights and std devs for one grid."""

    grid: tuple[float, ...]
    order: tuple[int, ...] = field(init=False)
    left: np.ndarray = field(init=False, repr=False)
    right: np.ndarray = field(init=False, repr=False)
    w_left: np.ndarray = field(init=False, repr=False)
    w_right: np.ndarray = field(init=False, repr=False)
    sd: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.concatenate([[0.0], self.grid])
        m = len(self.grid)
        order = bb_ordering(m)
        resolved = [0]
        left, right, wl, wr, sd = [], [], [], [], []
        for k, idx in enumerate(order):
            if k == 0:
                a, b = 0, None
            else:
                a = max(r for r in resolved if r < idx)
                b = min(r for r in resolved if r > idx)
            if b is None:
                left.append(0), right.append(0), wl.append(0.0), wr.append(0.0)
                sd.append(math.sqrt(t[idx]))
            else:
                span = t[b] - t[a]
                left.append(a), right.append(b)
                wl.append((t[b] - t[idx]) / span)
                wr.append((t[idx] - t[a]) / span)
                sd.append(math.sqrt((t[idx] - t[a]) * (t[b] - t[idx]) / span))
            resolved.append(idx)
        object.__setattr__(self, "order", tuple(order))
        for name, val in (("left", left), ("right", right)):
            object.__setattr__(self, name, np.array(val, dtype=np.int64))
        for name, val in (("w_left", wl), ("w_right", wr), ("sd", sd)):
            object.__setattr__(self, name, np.array(val))


@lru_cache(maxsize=16)
def _plan(grid: tuple[float, ...]) -> BridgePlan:
    return BridgePlan(grid)


def brownian_path(z, grid, mode: str = "forward") -> np.ndarray:
    """Brownian motion at the grid times driven by standard normals ``z`` (last axis = m).

    ``forward`` sums scaled increments.  ``bridge`` lets z[..., 0] set the
    terminal value and fills the remaining times in :func:`bb_ordering`
    order, each conditioned on its already-resolved neighbours.
    """
    z = np.asarray(z, dtype=np.float64)
    grid = tuple(float(t) for t in grid)
    m = len(grid)
    if z.shape[-1] != m:
        raise ValueError(f"expected {m} normals per path, got {z.shape[-1]}")
    if mode == "forward":
        dt = np.diff(np.concatenate([[0.0], grid]))
        return np.cumsum(z * np.sqrt(dt), axis=-1)
    if mode != "bridge":
        raise ValueError(f"unknown path construction {mode!r}")
    plan = _plan(grid)
    w = np.zeros(z.shape[:-1] + (m + 1,))
    for k, idx in enumerate(plan.order):
        a, b = plan.left[k], plan.right[k]
        w[..., idx] = plan.w_left[k] * w[..., a] + plan.w_right[k] * w[..., b] + plan.sd[k] * z[..., k]
    return w[..., 1:]


@dataclass(frozen=True)
class PathBatch:
    values: np.ndarray
    grid: tuple[float, ...]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow([f"t_{i + 1}" for i in range(len(self.grid))])
            out.writerows([[f"{v:.17g}" for v in row] for row in np.atleast_2d(self.values)])


def gbm_paths(model: MarketModel, w, asset: int = 0) -> PathBatch:
    """S(t_i) = S(0) exp((r - sigma^2/2) t_i + sigma W(t_i)) on the model grid."""
    if model.grid is None:
        raise ValueError("model has no monitoring grid")
    w = np.asarray(w, dtype=np.float64)
    t = np.asarray(model.grid)
    sigma = model.vols[asset]
    s0 = model.spots[asset]
    return PathBatch(s0 * np.exp((model.rate - 0.5 * sigma * sigma) * t + sigma * w), model.grid)


def terminal_basket_normals(u, L, model: MarketModel, maturity: float) -> np.ndarray:
    """Terminal asset values S_i(T) driven by uniforms ``u`` (rows of d coordinates)."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape[-1] != model.d:
        raise ValueError(f"expected {model.d} coordinates per point, got {u.shape[-1]}")
    z = inv_norm_cdf(u)
    return terminal_from_normals(np.atleast_1d(z), L, model, maturity)


def terminal_from_normals(z, L, model: MarketModel, maturity: float) -> np.ndarray:
    vols = np.asarray(model.vols)
    x = z @ np.asarray(L).T
    log_s = (np.log(model.spots) + (model.rate - 0.5 * vols ** 2) * maturity
             + vols * math.sqrt(maturity) * x)
    return np.exp(log_s)
