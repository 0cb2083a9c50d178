"""End-to-end MC / QMC / RQMC error studies for basket and Asian calls.

Work is split into independent tasks (one point block each).  Every task
derives its own seed from the master seed and its label through
:func:`derive_seed`, and results are reduced in task order, so the output
does not depend on the number of worker processes.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .. import __version__
from .._mixing import derive_seed
from ..lds import ScrambleSpec, default_faure_skip, faure_base, faure_points, halton_points, sobol_points
from ..lds.scramble import base2_to_unit, scramble_base2
from ..lds.sobol import default_params, sobol_ints
from ..pricing import OptionSpec, geo_basket_closed_form, mc_points
from ..stochastic import MarketModel, brownian_path, inv_norm_cdf, uniform_grid
from .config import AsianExperimentConfig, BasketExperimentConfig, config_hash
from .metrics import mc_rmse_curve
from .report import RmseReport, RmseRow, fit_all

REFERENCE_CHUNK = 2 ** 14


def run_tasks(fn, tasks, workers: int = 1) -> list:
    """map ``fn`` over ``tasks`` keeping task order, optionally in worker processes."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def prefix_means(values: np.ndarray, n_grid) -> np.ndarray:
    """Left-to-right running means of each column, read off at every n in ``n_grid``."""
    sums = np.cumsum(values, axis=0)
    return np.stack([sums[n - 1] / n for n in n_grid])


# --------------------------------------------------------------------------- basket


@dataclass(frozen=True)
class BasketOption:
    maturity: float
    vol_index: int
    strike: float
    vols: tuple[float, ...]


def basket_options(config: BasketExperimentConfig, d: int, layout: str = "shared") -> list[BasketOption]:
    """Options in (maturity, volatility, strike) order.

    ``shared``: every asset carries the option's volatility.  ``cycle``:
    asset i gets vols[(k + i) mod len(vols)] for the option's volatility
    index k, which is how baskets of arbitrary dimension are populated.
    """
    nv = len(config.vols)
    out = []
    for t in config.maturities:
        for k, sigma in enumerate(config.vols):
            if layout == "shared":
                vols = (sigma,) * d
            elif layout == "cycle":
                vols = tuple(config.vols[(k + i) % nv] for i in range(d))
            else:
                raise ValueError(f"unknown volatility layout {layout!r}")
            for strike in config.strikes:
                out.append(BasketOption(t, k, strike, vols))
    return out


def basket_truths(config: BasketExperimentConfig, options: list[BasketOption]) -> np.ndarray:
    return np.array([
        geo_basket_closed_form(MarketModel(config.spot, config.rate, o.vols),
                               OptionSpec("geometric-basket-call", o.strike, o.maturity))
        for o in options
    ])


def basket_estimates(u: np.ndarray, config: BasketExperimentConfig, options: list[BasketOption],
                     n_grid) -> np.ndarray:
    """(len(n_grid), len(options)) price estimates from the first n rows of ``u``.

    Independent assets: the log of the geometric average is
    log S0 + (r - mean(sigma_i^2)/2) T + sqrt(T) * sum_i sigma_i z_i / d.
    """
    z = inv_norm_cdf(u)
    d = u.shape[1]
    out = np.empty((len(n_grid), len(options)))
    groups: dict[tuple, list[int]] = {}
    for j, o in enumerate(options):
        groups.setdefault((o.maturity, o.vols), []).append(j)
    mixes = {}
    for (t, vols), members in groups.items():
        v = np.asarray(vols)
        if vols not in mixes:
            mixes[vols] = z @ v / d
        drift = math.log(config.spot) + (config.rate - 0.5 * float(np.mean(v ** 2))) * t
        geo = np.exp(drift + math.sqrt(t) * mixes[vols])
        strikes = np.array([options[j].strike for j in members])
        pay = math.exp(-config.rate * t) * np.maximum(geo[:, None] - strikes[None, :], 0.0)
        out[:, members] = prefix_means(pay, n_grid)
    return out


def _basket_points(method: str, n: int, d: int, config: BasketExperimentConfig, rep: int = 0) -> np.ndarray:
    if method == "sobol":
        return sobol_points(n, d, skip=config.sobol_skip).coords
    if method == "faure":
        skip = default_faure_skip(d) if config.faure_skip is None else config.faure_skip
        return faure_points(n, d, skip=skip).coords
    if method == "rqmc-sobol":
        spec = ScrambleSpec("nested-uniform", derive_seed(config.master_seed, "rqmc-sobol", d, rep))
        return sobol_points(n, d, skip=config.sobol_skip, scramble=spec).coords
    if method == "mc":
        return mc_points(n, d, derive_seed(config.master_seed, "mc", d, rep)).coords
    raise ValueError(f"unknown method {method!r}")


def _basket_task(args):
    method, config, d, layout, n_grid, rep = args
    options = basket_options(config, d, layout)
    u = _basket_points(method, max(n_grid), d, config, rep)
    return basket_estimates(u, config, options, n_grid)


def _rmse_over(estimates: list[np.ndarray], truths: np.ndarray) -> np.ndarray:
    """RMSE per grid row, pooling replications and options."""
    err = np.stack(estimates) - truths[None, None, :]
    return np.sqrt(np.mean(err ** 2, axis=(0, 2)))


def _basket_rows(config: BasketExperimentConfig, d: int, layout: str, grids: dict, reps: dict,
                 workers: int) -> list[RmseRow]:
    """Rows for every method in ``grids`` at dimension ``d``.

    ``grids['mc']`` is a pair (n_ref, n_grid): MC RMSE is measured at n_ref
    and extrapolated to n_grid with the square-root law, unless n_grid is
    None, in which case it is reported at n_ref only.
    """
    options = basket_options(config, d, layout)
    truths = basket_truths(config, options)
    tasks, owners = [], []
    for method, grid in grids.items():
        if method == "mc":
            grid = (grid[0],)
        for rep in range(reps.get(method, 1)):
            tasks.append((method, config, d, layout, tuple(grid), rep))
            owners.append(method)
    results = run_tasks(_basket_task, tasks, workers)
    rows = []
    for method, grid in grids.items():
        est = [r for r, m in zip(results, owners) if m == method]
        values = _rmse_over(est, truths)
        if method == "mc":
            n_ref, n_grid = grid
            if n_grid is None:
                rows.append(RmseRow("mc", n_ref, d, float(values[0])))
            else:
                rows += [RmseRow("mc", n, d, e) for n, e in mc_rmse_curve(float(values[0]), n_ref, n_grid)]
        else:
            rows += [RmseRow(method, int(n), d, float(e)) for n, e in zip(grid, values)]
    return rows


def _meta(config, started: float, **extra) -> dict:
    return {"version": __version__, "config_hash": config_hash(config), "config": asdict(config),
            "master_seed": config.master_seed,
            "started": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
            "elapsed_seconds": round(time.time() - started, 3), **extra}


def run_basket_experiment(config: BasketExperimentConfig, workers: int = 1) -> RmseReport:
    """RMSE against the closed form over all options, per method and sample size."""
    config.validate()
    started = time.time()
    d = config.assets
    grids, reps = {}, {}
    for method in config.methods:
        if method == "sobol":
            grids[method] = config.sobol_grid
        elif method == "faure":
            grids[method] = config.faure_grid
        elif method == "rqmc-sobol":
            grids[method] = config.rqmc_grid
            reps[method] = config.rqmc_replications
        elif method == "mc":
            grids[method] = (config.mc_ref_n, config.mc_grid)
            reps[method] = config.mc_replications
    rows = _basket_rows(config, d, "shared", grids, reps, workers)
    return RmseReport(rows, fit_all(rows), _meta(config, started, experiment="basket"))


def run_dimension_sweep(config: BasketExperimentConfig, d_grid=None, workers: int = 1) -> RmseReport:
    """RMSE against dimension at fixed n per method (volatilities cycle across assets)."""
    config.validate()
    started = time.time()
    d_grid = tuple(config.dim_grid if d_grid is None else d_grid)
    for d in d_grid:
        if "faure" in config.methods:
            faure_base(d)
    rows = []
    for d in d_grid:
        grids, reps = {}, {}
        for method in config.methods:
            if method == "sobol":
                grids[method] = (config.sweep_sobol_n,)
            elif method == "faure":
                grids[method] = (config.sweep_faure_n,)
            elif method == "rqmc-sobol":
                grids[method] = (config.sweep_sobol_n,)
                reps[method] = config.rqmc_replications
            elif method == "mc":
                grids[method] = (config.sweep_mc_n, None)
                reps[method] = config.sweep_mc_replications
        rows += _basket_rows(config, d, "cycle", grids, reps, workers)
    return RmseReport(rows, {}, _meta(config, started, experiment="dimsweep", d_grid=list(d_grid)),
                      x_axis="d")


@dataclass(frozen=True)
class RqmcCheck:
    estimate: np.ndarray
    stderr: np.ndarray
    truth: np.ndarray

    @property
    def zscores(self) -> np.ndarray:
        return (self.estimate - self.truth) / self.stderr


def rqmc_basket_check(config: BasketExperimentConfig, n: int = 2 ** 14, randomizations: int = 8,
                      workers: int = 1) -> RqmcCheck:
    """Scrambled-Sobol' prices of every basket option with randomization standard errors."""
    d = config.assets
    options = basket_options(config, d, "shared")
    tasks = [("rqmc-sobol", config, d, "shared", (n,), rep) for rep in range(randomizations)]
    est = np.stack([r[0] for r in run_tasks(_basket_task, tasks, workers)])
    return RqmcCheck(est.mean(axis=0), est.std(axis=0, ddof=1) / math.sqrt(randomizations),
                     basket_truths(config, options))


# --------------------------------------------------------------------------- asian


def asian_payoffs(u: np.ndarray, config: AsianExperimentConfig, mode: str, vols) -> np.ndarray:
    """(n, len(vols) * len(strikes)) discounted Asian payoffs, (sigma, K) sigma-major."""
    grid = uniform_grid(config.maturity, config.steps)
    t = np.asarray(grid)
    w = brownian_path(inv_norm_cdf(u), grid, mode)
    disc = math.exp(-config.rate * config.maturity)
    strikes = np.asarray(config.strikes)
    cols = []
    for sigma in vols:
        avg = np.mean(config.spot * np.exp((config.rate - 0.5 * sigma * sigma) * t + sigma * w), axis=1)
        cols.append(disc * np.maximum(avg[:, None] - strikes[None, :], 0.0))
    return np.concatenate(cols, axis=1)


def _asian_points(method: str, n: int, config: AsianExperimentConfig, vol_index: int, rep: int):
    m = config.steps
    if method == "mc":
        return mc_points(n, m, derive_seed(config.master_seed, "asian-mc", vol_index, rep)).coords
    if method == "rqmc-sobol":
        spec = ScrambleSpec("nested-uniform", derive_seed(config.master_seed, "asian-rqmc", vol_index, rep))
        return sobol_points(n, m, skip=config.sobol_skip, scramble=spec).coords
    if method == "halton":
        return halton_points(n, m, skip=config.halton_skip).coords
    raise ValueError(f"unknown method {method!r}")


ASIAN_CONSTRUCTION = {"mc": "forward", "rqmc-sobol": "bridge", "halton": "bridge"}


def _asian_task(args):
    method, config, vol_index, rep = args
    u = _asian_points(method, max(config.n_grid), config, vol_index, rep)
    pay = asian_payoffs(u, config, ASIAN_CONSTRUCTION[method], (config.vols[vol_index],))
    return prefix_means(pay, config.n_grid)


def _reference_task(args):
    config, start, count = args
    params = default_params(config.steps)
    omegas = np.arange(config.sobol_skip + 1 + start, config.sobol_skip + 1 + start + count)
    raw = sobol_ints(omegas, params)
    sums = []
    for r in range(config.reference_randomizations):
        spec = ScrambleSpec("nested-uniform", derive_seed(config.master_seed, "asian-reference", r))
        ints, depth = scramble_base2(raw, params.depth, spec)
        pay = asian_payoffs(base2_to_unit(ints, depth), config, "bridge", config.vols)
        sums.append(np.cumsum(pay, axis=0)[-1])
    return np.stack(sums)


def asian_reference_prices(config: AsianExperimentConfig, workers: int = 1) -> np.ndarray:
    """Scrambled-Sobol' + bridge prices with ``reference_paths`` paths per randomization,
    averaged over the randomizations; one value per (sigma, K)."""
    if config.sobol_skip + config.reference_paths >= 2 ** 32:
        raise ValueError("reference run overflows 32-bit Sobol' indices")
    chunks = [(config, s, min(REFERENCE_CHUNK, config.reference_paths - s))
              for s in range(0, config.reference_paths, REFERENCE_CHUNK)]
    total = np.zeros((config.reference_randomizations, config.combinations))
    for part in run_tasks(_reference_task, chunks, workers):
        total += part
    return np.mean(total / config.reference_paths, axis=0)


def run_asian_experiment(config: AsianExperimentConfig, workers: int = 1,
                         reference: np.ndarray | None = None) -> RmseReport:
    """RMSE over repetitions x (sigma, K) combinations against reference prices."""
    config.validate()
    started = time.time()
    if reference is None:
        reference = asian_reference_prices(config, workers)
    reference = np.asarray(reference, dtype=np.float64)
    nv = len(config.vols)
    tasks = []
    for method in config.methods:
        reps = 1 if method == "halton" else config.repetitions
        tasks += [(method, config, k, rep) for k in range(nv) for rep in range(reps)]
    results = run_tasks(_asian_task, tasks, workers)
    nk = len(config.strikes)
    rows = []
    for method in config.methods:
        sq = []
        for (m, _, k, _), est in zip(tasks, results):
            if m == method:
                sq.append((est - reference[None, k * nk:(k + 1) * nk]) ** 2)
        values = np.sqrt(np.mean(np.concatenate(sq, axis=1), axis=1))
        rows += [RmseRow(method, int(n), config.steps, float(e)) for n, e in zip(config.n_grid, values)]
    meta = _meta(config, started, experiment="asian", reference_prices=reference.tolist())
    return RmseReport(rows, fit_all(rows), meta)
