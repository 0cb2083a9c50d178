from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

SCRAMBLE_MODES = ("none", "digital-shift", "nested-uniform")
_MODE_ALIASES = {"shift": "digital-shift", "owen": "nested-uniform"}


@dataclass(frozen=True)
class ScrambleSpec:
    """Randomization applied to the digits of a low-discrepancy point set.

    ``depth=None`` means "use the generator's native digit depth" (32 bits
    for base 2, 16 digits otherwise, more if the index needs them).
    """

    mode: str = "none"
    seed: int = 0
    depth: int | None = None

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in SCRAMBLE_MODES:
            raise ValueError(f"unknown scramble mode {self.mode!r}; expected one of {SCRAMBLE_MODES}")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"scramble depth must be >= 1, got {self.depth}")

    @property
    def active(self) -> bool:
        return self.mode != "none"


NO_SCRAMBLE = ScrambleSpec()


@dataclass(frozen=True)
class PointSet:
    """Immutable n x d block of points in [0, 1)^d plus generation metadata."""

    coords: np.ndarray
    family: str
    bases: tuple[int, ...] = ()
    skip: int = 0
    include_origin: bool = False
    scramble: ScrambleSpec = field(default=NO_SCRAMBLE)
    seed: int | None = None
    # Re-runs the generator with a different ScrambleSpec; used by apply_scramble.
    source: Callable[..., "PointSet"] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValueError(f"coordinates must form a non-empty (n, d) array, got shape {coords.shape}")
        if not np.all((coords >= 0.0) & (coords < 1.0)):
            raise ValueError("point coordinates must lie in [0, 1)")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "bases", tuple(int(b) for b in self.bases))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def randomized(self) -> bool:
        return self.family == "mc" or self.scramble.active

    def __len__(self):
        return self.n

    def head(self, n: int) -> "PointSet":
        """First ``n`` points, keeping the metadata."""
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot take {n} points from a set of {self.n}")
        return PointSet(self.coords[:n], self.family, self.bases, self.skip,
                        self.include_origin, self.scramble, self.seed)

    def to_csv(self, path: str | Path) -> None:
        write_points_csv(self.coords, path)


def write_points_csv(coords: np.ndarray, path: str | Path) -> None:
    coords = np.atleast_2d(coords)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(coords.shape[1])])
        for row in coords:
            writer.writerow([f"{v:.17g}" for v in row])


def read_points_csv(path: str | Path) -> PointSet:
    """Read a point set written by :func:`write_points_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or any(h.strip() != f"x{i + 1}" for i, h in enumerate(header)):
            raise ValueError(f"{path}: expected header x1,...,xd, got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no points")
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return PointSet(np.array(rows), family="file")
