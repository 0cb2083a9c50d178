"""Payoffs, closed-form references and the MC / QMC / RQMC price estimator."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .lds import PointSet
from .stochastic import MarketModel, brownian_path, cholesky, inv_norm_cdf, terminal_from_normals

OPTION_KINDS = ("vanilla-call", "geometric-basket-call", "arithmetic-asian-call")
CONSTRUCTIONS = ("terminal", "forward-path", "bridge-path")


@dataclass(frozen=True)
class OptionSpec:
    kind: str
    strike: float
    maturity: float

    def __post_init__(self):
        if self.kind not in OPTION_KINDS:
            raise ValueError(f"unknown option kind {self.kind!r}; expected one of {OPTION_KINDS}")
        if self.strike <= 0:
            raise ValueError(f"strike must be positive, got {self.strike}")
        if self.maturity <= 0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")


@dataclass(frozen=True)
class PriceEstimate:
    value: float
    n: int
    stderr: float | None
    method: str


def geo_basket_payoff(terminal, strike: float) -> np.ndarray:
    """((prod S_i)^(1/d) - K)^+ over the last axis, via the mean of logs."""
    terminal = np.asarray(terminal, dtype=np.float64)
    geo = np.exp(np.mean(np.log(terminal), axis=-1))
    return np.maximum(geo - strike, 0.0)


def asian_payoff(path, strike: float) -> np.ndarray:
    """(mean_i S(t_i) - K)^+ over the last axis."""
    return np.maximum(np.mean(np.asarray(path, dtype=np.float64), axis=-1) - strike, 0.0)


def norm_cdf(x):
    return ndtr(x)


def black_scholes_call(s0: float, strike: float, rate: float, sigma: float, maturity: float,
                       dividend_yield: float = 0.0) -> float:
    """Black-Scholes call with a continuous dividend-like yield.

    When sigma * sqrt(T) < 1e-12 the price is the discounted forward
    intrinsic value max(e^{-yT} S0 - e^{-rT} K, 0).
    """
    if s0 <= 0 or strike <= 0 or maturity <= 0 or sigma < 0:
        raise ValueError("black_scholes_call needs positive S0, K, T and non-negative sigma")
    carry = math.exp(-dividend_yield * maturity) * s0
    disc_k = math.exp(-rate * maturity) * strike
    vol = sigma * math.sqrt(maturity)
    if vol < 1e-12:
        return max(carry - disc_k, 0.0)
    delta = (math.log(s0 / strike) + (rate - dividend_yield + 0.5 * sigma * sigma) * maturity) / vol
    return float(carry * norm_cdf(delta) - disc_k * norm_cdf(delta - vol))


def basket_parameters(model: MarketModel) -> tuple[float, float]:
    """(sigma, xi): volatility and yield of the geometric average as a single GBM."""
    vols = np.asarray(model.vols)
    d = model.d
    sigma = math.sqrt(float(vols @ model.corr @ vols)) / d
    xi = float(np.sum(vols ** 2)) / (2 * d) - 0.5 * sigma * sigma
    return sigma, xi


def geo_basket_closed_form(model: MarketModel, spec: OptionSpec) -> float:
    """Exact price of a geometric-average basket call on equal-spot assets."""
    spots = model.spots
    if not np.all(spots == spots[0]):
        raise ValueError("closed form assumes all assets share the same spot")
    sigma, xi = basket_parameters(model)
    return black_scholes_call(float(spots[0]), spec.strike, model.rate, sigma, spec.maturity, xi)


def mc_points(n: int, d: int, seed: int, stream: int = 0) -> PointSet:
    """Pseudo-random uniforms from PCG64 seeded with SeedSequence(seed, spawn_key=(stream,)).

    Each (seed, stream) pair is an independent, reproducible substream.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(stream),))
    u = np.random.Generator(np.random.PCG64(ss)).random((n, d))
    return PointSet(u, "mc", seed=int(seed))


def required_dim(model: MarketModel, spec: OptionSpec, construction: str) -> int:
    if construction == "terminal":
        return model.d
    if model.grid is None:
        raise ValueError(f"{construction} construction needs a monitoring grid")
    return len(model.grid)


def discounted_payoffs(points, model: MarketModel, spec: OptionSpec, construction: str,
                       normals: np.ndarray | None = None) -> np.ndarray:
    """e^{-rT} * payoff for every point; ``normals`` may carry precomputed quantiles."""
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction!r}; expected one of {CONSTRUCTIONS}")
    u = points.coords if isinstance(points, PointSet) else np.asarray(points)
    need = required_dim(model, spec, construction)
    got = (normals if normals is not None else u).shape[-1]
    if got != need:
        raise ValueError(f"{construction} construction needs dimension {need}, got {got}")
    z = inv_norm_cdf(u) if normals is None else normals
    disc = math.exp(-model.rate * spec.maturity)
    if construction == "terminal":
        terminal = terminal_from_normals(z, cholesky(model.corr), model, spec.maturity)
        if spec.kind == "geometric-basket-call" or model.d == 1:
            return disc * geo_basket_payoff(terminal, spec.strike)
        raise ValueError(f"terminal construction cannot price {spec.kind}")
    mode = "forward" if construction == "forward-path" else "bridge"
    w = brownian_path(z, model.grid, mode)
    t = np.asarray(model.grid)
    sigma = model.vols[0]
    path = model.spots[0] * np.exp((model.rate - 0.5 * sigma * sigma) * t + sigma * w)
    if spec.kind == "vanilla-call":
        return disc * np.maximum(path[:, -1] - spec.strike, 0.0)
    return disc * asian_payoff(path, spec.strike)


def sample_mean(values) -> float:
    """Correctly rounded mean (math.fsum), independent of how the array was blocked."""
    values = np.asarray(values, dtype=np.float64).ravel()
    return math.fsum(values.tolist()) / values.size


def estimate_price(points: PointSet, model: MarketModel, spec: OptionSpec,
                   construction: str = "terminal") -> PriceEstimate:
    """Average discounted payoff over ``points``.

    A standard error s / sqrt(n) is attached only for pseudo-random or
    scrambled inputs.
    """
    payoff = discounted_payoffs(points, model, spec, construction)
    value = sample_mean(payoff)
    stderr = None
    if points.randomized and points.n > 1:
        dev = payoff - value
        stderr = math.sqrt(math.fsum((dev * dev).tolist()) / (points.n - 1) / points.n)
    method = points.family if not points.scramble.active else f"{points.family}+{points.scramble.mode}"
    return PriceEstimate(value, points.n, stderr, method)
