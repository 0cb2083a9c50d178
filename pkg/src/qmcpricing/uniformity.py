"""Star discrepancy (exact for small sets) and bin-count uniformity tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .lds import PointSet

EXACT_MAX_N = 64
EXACT_MAX_D = 3


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    d: int
    dstar: float
    method: str
    witness: tuple[float, ...] | None = None
    closed: bool | None = None  # True: sup approached from above the corner (count includes boundary)

    def as_text(self) -> str:
        lines = [f"{'n':<10}{self.n}", f"{'d':<10}{self.d}", f"{'method':<10}{self.method}",
                 f"{'D*':<10}{self.dstar:.17g}"]
        if self.witness is not None:
            corner = ", ".join(f"{a:.17g}" for a in self.witness)
            lines.append(f"{'witness':<10}({corner}) {'closed' if self.closed else 'open'}")
        return "\n".join(lines)

    def as_csv_row(self) -> str:
        return f"{self.n},{self.d},{self.method},{self.dstar:.17g}"


def _coords(points) -> np.ndarray:
    x = points.coords if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.size == 0:
        raise ValueError("empty point set")
    return x


def box_deviation(x: np.ndarray, corner, closed: bool) -> float:
    """Deviation of the anchored box at ``corner``.

    Open: vol([0, a)) - #{x < a}/n.  Closed: #{x <= a}/n - vol, the limit of
    half-open boxes shrinking onto [0, a].
    """
    corner = np.asarray(corner)
    vol = float(np.prod(corner))
    if closed:
        return float(np.mean(np.all(x <= corner, axis=1))) - vol
    return vol - float(np.mean(np.all(x < corner, axis=1)))


def star_discrepancy_1d(points) -> DiscrepancyReport:
    """max_i max(x_(i) - (i-1)/n, i/n - x_(i)) over the sorted points."""
    x = _coords(points)
    if x.shape[1] != 1:
        raise ValueError("star_discrepancy_1d needs one-dimensional points")
    s = np.sort(x[:, 0])
    n = s.size
    i = np.arange(1, n + 1)
    open_gap = s - (i - 1) / n
    closed_gap = i / n - s
    k_open, k_closed = int(np.argmax(open_gap)), int(np.argmax(closed_gap))
    if open_gap[k_open] >= closed_gap[k_closed]:
        return DiscrepancyReport(n, 1, float(open_gap[k_open]), "exact-1d", (float(s[k_open]),), False)
    return DiscrepancyReport(n, 1, float(closed_gap[k_closed]), "exact-1d", (float(s[k_closed]),), True)


def star_discrepancy_exact(points) -> DiscrepancyReport:
    """Exact D* by enumerating every corner on the grid of point coordinates (plus 1).

    Limited to n <= 64 and d <= 3; anything larger is refused.
    """
    x = _coords(points)
    n, d = x.shape
    if n > EXACT_MAX_N or d > EXACT_MAX_D:
        raise ValueError(f"exact star discrepancy is limited to n <= {EXACT_MAX_N}, d <= {EXACT_MAX_D} "
                         f"(got n={n}, d={d}); use the statistical mode instead")
    axes = [np.unique(np.concatenate([x[:, j], [1.0]])) for j in range(d)]
    letters = "abc"[:d]
    spec = ",".join(f"{c}i" for c in letters) + "->" + letters
    vol = np.ones([len(a) for a in axes])
    for j, a in enumerate(axes):
        vol = vol * a.reshape([-1 if k == j else 1 for k in range(d)])
    # counts[c1, .., cd] = #points strictly below / weakly below the corner
    below = np.einsum(spec, *[(x[None, :, j] < a[:, None]).astype(float) for j, a in enumerate(axes)])
    upto = np.einsum(spec, *[(x[None, :, j] <= a[:, None]).astype(float) for j, a in enumerate(axes)])
    dev_open = vol - below / n
    dev_closed = upto / n - vol
    k_open, k_closed = int(np.argmax(dev_open)), int(np.argmax(dev_closed))
    closed = bool(dev_closed.flat[k_closed] > dev_open.flat[k_open])
    k = k_closed if closed else k_open
    best = float((dev_closed if closed else dev_open).flat[k])
    corner = np.unravel_index(k, vol.shape)
    witness = tuple(float(axes[j][c]) for j, c in enumerate(corner))
    return DiscrepancyReport(n, d, best, "exact-grid", witness, closed)


def star_discrepancy_lower_bound(points, max_corners: int = 20000, seed: int = 0) -> DiscrepancyReport:
    """Lower bound on D* from a random subset of the candidate corners.

    Used for sets too large for the exact enumerator.
    """
    x = _coords(points)
    n, d = x.shape
    rng = np.random.default_rng(seed)
    axes = [np.concatenate([x[:, j], [1.0]]) for j in range(d)]
    idx = rng.integers(0, n + 1, size=(max_corners, d))
    best = 0.0
    for row in idx:
        corner = [axes[j][row[j]] for j in range(d)]
        best = max(best, box_deviation(x, corner, False), box_deviation(x, corner, True))
    return DiscrepancyReport(n, d, best, "statistical")


def uniformity_chi_square(points, bins_per_axis: int) -> tuple[float, float]:
    """Chi-square statistic and p-value of the k^d bin counts against uniform."""
    x = _coords(points)
    n, d = x.shape
    cells = bins_per_axis ** d
    if cells > 10 ** 6:
        raise ValueError(f"{bins_per_axis}^{d} = {cells} bins exceeds the 10^6 cap")
    idx = np.minimum((x * bins_per_axis).astype(np.int64), bins_per_axis - 1)
    flat = np.ravel_multi_index(idx.T, (bins_per_axis,) * d)
    counts = np.bincount(flat, minlength=cells)
    expected = n / cells
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, float(chi2.sf(stat, cells - 1))
