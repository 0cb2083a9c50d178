"""Command line front end: ``qmcbench gen | discrepancy | price | experiment``.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import load_config, run_asian_experiment, run_basket_experiment, run_dimension_sweep, write_report
from .bench.experiments import basket_options
from .lds import (ScrambleSpec, default_faure_skip, faure_points, halton_points, hammersley_points,
                  read_points_csv, sobol_points, van_der_corput)
from .pricing import OptionSpec, estimate_price, geo_basket_closed_form, mc_points
from .stochastic import MarketModel, uniform_grid
from .uniformity import star_discrepancy_1d, star_discrepancy_exact, star_discrepancy_lower_bound

SCRAMBLE_MODES = {"none": "none", "shift": "digital-shift", "owen": "nested-uniform"}


class _IOFailure(Exception):
    pass


def _generate(args):
    spec = ScrambleSpec(SCRAMBLE_MODES[args.scramble], args.seed)
    family, d, n = args.family, args.dim, args.count
    if family == "vdc":
        if d != 1:
            raise ValueError("vdc is one-dimensional; use --dim 1")
        return van_der_corput(n, 2, skip=args.skip or 0, scramble=spec)
    if family == "halton":
        return halton_points(n, d, skip=args.skip or 0, scramble=spec)
    if family == "hammersley":
        if args.skip or spec.active:
            raise ValueError("hammersley takes no --skip or --scramble")
        return hammersley_points(n, d)
    if family == "faure":
        return faure_points(n, d, skip=args.skip, scramble=spec)
    return sobol_points(n, d, skip=256 if args.skip is None else args.skip, scramble=spec)


def cmd_gen(args) -> int:
    points = _generate(args)
    try:
        points.to_csv(args.out)
    except OSError as exc:
        raise _IOFailure(exc) from None
    print(f"wrote {points.n} x {points.d} {points.family} points to {args.out}")
    return 0


def cmd_discrepancy(args) -> int:
    try:
        points = read_points_csv(args.input)
    except OSError as exc:
        raise _IOFailure(exc) from None
    if args.exact:
        report = star_discrepancy_exact(points)
    elif points.d == 1:
        report = star_discrepancy_1d(points)
    else:
        report = star_discrepancy_lower_bound(points)
    print(report.as_text())
    return 0


def _price_points(method: str, n: int, d: int, seed: int, skip_sobol: int, skip_faure: int | None):
    if method == "mc":
        return mc_points(n, d, seed)
    if method == "sobol":
        return sobol_points(n, d, skip=skip_sobol)
    if method == "rqmc-sobol":
        return sobol_points(n, d, skip=skip_sobol, scramble=ScrambleSpec("nested-uniform", seed))
    return faure_points(n, d, skip=default_faure_skip(d) if skip_faure is None else skip_faure)


def _fmt(v) -> str:
    return "" if v is None else f"{v:.10g}"


def cmd_price(args) -> int:
    config = _load(args.config, args.product)
    seed = config.master_seed if args.seed is None else args.seed
    out = sys.stdout
    if args.product == "basket":
        d = config.assets
        points = _price_points(args.method, args.n, d, seed, config.sobol_skip, config.faure_skip)
        out.write("maturity,vol,strike,estimate,stderr,closed_form\n")
        for o in basket_options(config, d):
            model = MarketModel(config.spot, config.rate, o.vols)
            spec = OptionSpec("geometric-basket-call", o.strike, o.maturity)
            est = estimate_price(points, model, spec)
            truth = geo_basket_closed_form(model, spec)
            out.write(f"{o.maturity:g},{o.vols[0]:g},{o.strike:g},{_fmt(est.value)},{_fmt(est.stderr)},"
                      f"{_fmt(truth)}\n")
        return 0
    m = config.steps
    points = _price_points(args.method, args.n, m, seed, config.sobol_skip, None)
    construction = "forward-path" if args.method == "mc" else "bridge-path"
    out.write("vol,strike,estimate,stderr\n")
    for sigma in config.vols:
        model = MarketModel(config.spot, config.rate, (sigma,), grid=uniform_grid(config.maturity, m))
        for strike in config.strikes:
            est = estimate_price(points, model, OptionSpec("arithmetic-asian-call", strike, config.maturity),
                                 construction)
            out.write(f"{sigma:g},{strike:g},{_fmt(est.value)},{_fmt(est.stderr)}\n")
    return 0


def cmd_experiment(args) -> int:
    config = _load(args.config, args.kind)
    if args.kind == "basket":
        report = run_basket_experiment(config, workers=args.workers)
    elif args.kind == "dimsweep":
        report = run_dimension_sweep(config, workers=args.workers)
    else:
        report = run_asian_experiment(config, workers=args.workers)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_report(report, out / "rmse.csv", out / "rmse.svg", title=f"{args.kind} RMSE")
        (out / "run-meta.json").write_text(json.dumps(report.meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise _IOFailure(exc) from None
    for method, fit in sorted(report.fits.items()):
        print(f"{method:<12} slope {fit.slope:+.3f}  R2 {fit.r2:.3f}")
    print(f"wrote {out / 'rmse.csv'}, {out / 'rmse.svg'}, {out / 'run-meta.json'}")
    return 0


def _load(path, kind):
    try:
        return load_config(path, kind)
    except OSError as exc:
        raise _IOFailure(exc) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmcbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--version", action="version", version=f"qmcbench {__version__}")
        return p

    p = add("gen", "generate a point set and write it as CSV")
    p.add_argument("--family", required=True, choices=["vdc", "halton", "hammersley", "faure", "sobol"])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--skip", type=int, default=None, help="burn-in (sobol 256, faure b^4, others 0)")
    p.add_argument("--scramble", choices=list(SCRAMBLE_MODES), default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = add("discrepancy", "star discrepancy of a CSV point set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--exact", action="store_true", help="exact enumeration (n <= 64, d <= 3)")
    p.set_defaults(func=cmd_discrepancy)

    p = add("price", "price every option of a config with one method")
    p.add_argument("product", choices=["basket", "asian"])
    p.add_argument("--config", required=True)
    p.add_argument("--method", required=True, choices=["mc", "sobol", "faure", "rqmc-sobol"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_price)

    p = add("experiment", "run an RMSE study and write rmse.csv, rmse.svg, run-meta.json")
    p.add_argument("kind", choices=["basket", "asian", "dimsweep"])
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
