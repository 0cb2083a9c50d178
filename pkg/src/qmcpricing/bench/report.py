"""RMSE reports: CSV rows, fitted slopes and a self-contained log-log SVG chart."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .metrics import SlopeFit, fit_slope

CSV_HEADER = ("method", "n", "d", "rmse")
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class RmseRow:
    method: str
    n: int
    d: int
    rmse: float


@dataclass
class RmseReport:
    rows: list[RmseRow]
    fits: dict[str, SlopeFit] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    x_axis: str = "n"

    def __post_init__(self):
        if any(r.rmse < 0 for r in self.rows):
            raise ValueError("rmse values must be non-negative")
        self.rows = sorted(self.rows, key=lambda r: (r.method, r.n, r.d))

    def methods(self) -> list[str]:
        return sorted({r.method for r in self.rows})

    def series(self, method: str) -> list[RmseRow]:
        return [r for r in self.rows if r.method == method]

    def value(self, method: str, n: int | None = None, d: int | None = None) -> float:
        hits = [r.rmse for r in self.series(method)
                if (n is None or r.n == n) and (d is None or r.d == d)]
        if len(hits) != 1:
            raise KeyError(f"no unique row for method={method!r}, n={n}, d={d}")
        return hits[0]

    def fit(self, method: str, n_min: int | None = None, n_max: int | None = None) -> SlopeFit:
        """Slope of log rmse against log n, optionally restricted to [n_min, n_max]."""
        rows = [(r.n, r.rmse) for r in self.series(method)
                if (n_min is None or r.n >= n_min) and (n_max is None or r.n <= n_max)]
        return fit_slope(rows)


def fit_all(rows: list[RmseRow]) -> dict[str, SlopeFit]:
    fits = {}
    for method in sorted({r.method for r in rows}):
        pts = [(r.n, r.rmse) for r in rows if r.method == method]
        if len({n for n, _ in pts}) >= 3 and all(e > 0 for _, e in pts):
            fits[method] = fit_slope(pts)
    return fits


def write_csv(report: RmseReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_HEADER)
        for r in report.rows:
            out.writerow([r.method, r.n, r.d, f"{r.rmse:.17g}"])


def read_report_csv(path: str | Path) -> list[RmseRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
        return [RmseRow(m, int(n), int(d), float(e)) for m, n, d, e in reader]


def _nice_decades(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1))


def render_svg(report: RmseReport, title: str = "RMSE") -> str:
    """Log-log chart, one polyline per method, no external assets."""
    width, height, pad_l, pad_r, pad_t, pad_b = 640, 440, 80, 150, 40, 60
    xkey = report.x_axis
    pts = [(getattr(r, xkey), r.rmse) for r in report.rows if r.rmse > 0]
    xs = [math.log10(x) for x, _ in pts]
    ys = [math.log10(y) for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y_dec = _nice_decades(10 ** min(ys), 10 ** max(ys))
    y0, y1 = y_dec[0], max(y_dec[-1], y_dec[0] + 1)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def sx(v):
        return pad_l + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return pad_t + (y1 - v) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad_l + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for dec in range(y0, y1 + 1):
        y = sy(dec)
        parts.append(f'<line x1="{pad_l}" y1="{y:.1f}" x2="{pad_l + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{pad_l - 6}" y="{y + 4:.1f}" text-anchor="end">1e{dec}</text>')
    for x in sorted({getattr(r, xkey) for r in report.rows}):
        px = sx(math.log10(x))
        parts.append(f'<line x1="{px:.1f}" y1="{pad_t + ph}" x2="{px:.1f}" y2="{pad_t + ph + 4}" stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{pad_t + ph + 18}" text-anchor="middle">{x}</text>')
    xlabel = "number of points n" if xkey == "n" else "dimension d"
    parts.append(f'<text x="{pad_l + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">{xlabel} (log scale)</text>')
    parts.append(f'<text transform="translate(18,{pad_t + ph / 2:.1f}) rotate(-90)" '
                 f'text-anchor="middle">RMSE (log scale)</text>')
    for k, method in enumerate(report.methods()):
        color = _COLORS[k % len(_COLORS)]
        series = [(getattr(r, xkey), r.rmse) for r in report.series(method) if r.rmse > 0]
        coords = " ".join(f"{sx(math.log10(x)):.2f},{sy(math.log10(y)):.2f}" for x, y in series)
        parts.append(f'<polyline data-method="{escape(method)}" points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        ly = pad_t + 16 + 20 * k
        label = method
        if method in report.fits:
            label += f" (slope {report.fits[method].slope:.2f})"
        parts.append(f'<line x1="{pad_l + pw + 10}" y1="{ly - 4}" x2="{pad_l + pw + 30}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{pad_l + pw + 34}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report(report: RmseReport, csv_path: str | Path, svg_path: str | Path | None = None,
                 title: str = "RMSE") -> None:
    """Write the CSV (and optionally the SVG chart).  Empty reports are refused."""
    if not report.rows:
        raise ValueError("refusing to write an empty report")
    svg = render_svg(report, title) if svg_path is not None else None
    write_csv(report, csv_path)
    if svg is not None:
        Path(svg_path).write_text(svg)
