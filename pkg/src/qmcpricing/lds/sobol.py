"""Sobol' sequences from primitive polynomials and initial direction integers."""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache, partial
from importlib import resources
from pathlib import Path

import numpy as np

from .pointset import NO_SCRAMBLE, PointSet, ScrambleSpec
from .radical import indices
from .scramble import base2_to_unit, scramble_base2

DEFAULT_SKIP = 256
DEFAULT_DEPTH = 32
PARAMS_ENV = "QMC_SOBOL_PARAMS"


@dataclass(frozen=True)
class SobolRecord:
    dim: int
    degree: int
    a: int
    m: tuple[int, ...]


def parse_sobol_records(text: str, origin: str = "<string>") -> dict[int, SobolRecord]:
    """Parse ``dim q a m_1 .. m_q`` lines; ``#`` starts a comment line."""
    records = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"{origin}:{lineno}: non-integer field in {line!r}") from None
        if len(fields) < 4:
            raise ValueError(f"{origin}:{lineno}: expected 'dim q a m_1 ... m_q'")
        dim, q, a, m = fields[0], fields[1], fields[2], tuple(fields[3:])
        if dim < 2:
            raise ValueError(f"{origin}:{lineno}: dim must be >= 2 (dimension 1 is built in)")
        if q < 1 or len(m) != q:
            raise ValueError(f"{origin}:{lineno}: degree {q} needs {q} initial values, got {len(m)}")
        if not 0 <= a < (1 << max(q - 1, 0)) and not (q == 1 and a == 0):
            raise ValueError(f"{origin}:{lineno}: coefficient word {a} too wide for degree {q}")
        records[dim] = SobolRecord(dim, q, a, m)
    return records


def params_path() -> Path:
    override = os.environ.get(PARAMS_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("qmcpricing") / "data" / "sobol_params.txt"))


@lru_cache(maxsize=8)
def _load(path: str) -> dict[int, SobolRecord]:
    with open(path) as fh:
        return parse_sobol_records(fh.read(), path)


def load_sobol_records(path: str | Path | None = None) -> dict[int, SobolRecord]:
    """Records from ``path``, ``$QMC_SOBOL_PARAMS`` or the bundled file, in that order."""
    return _load(str(path if path is not None else params_path()))


def direction_integers(record: SobolRecord, depth: int) -> list[int]:
    """mu_1..mu_depth: the record's initial values extended by the XOR recurrence."""
    q = record.degree
    mu = list(record.m[:depth])
    for j, m in enumerate(mu, 1):
        if m % 2 == 0 or not 0 < m < (1 << j):
            raise ValueError(f"Sobol' dimension {record.dim}: initial value m_{j} = {m} "
                             f"must be odd and below 2^{j}")
    alpha = [(record.a >> (q - 1 - k)) & 1 for k in range(1, q)]
    for j in range(q + 1, depth + 1):
        new = mu[j - q - 1] ^ (mu[j - q - 1] << q)
        for k, bit in enumerate(alpha, 1):
            if bit:
                new ^= mu[j - k - 1] << k
        mu.append(new)
    return mu


@dataclass(frozen=True)
class SobolParams:
    """Per-coordinate direction integers for a d-dimensional Sobol' generator.

    ``mu[i][j-1]`` is the odd integer mu_j < 2^j of coordinate i + 1;
    ``directions[i, j-1] = mu_j << (depth - j)`` is column j of the
    generator matrix packed as a depth-bit integer.
    """

    dim: int
    depth: int
    degrees: tuple[int, ...]
    coefficients: tuple[int, ...]
    mu: tuple[tuple[int, ...], ...]
    directions: np.ndarray

    def generator_matrix(self, i: int) -> np.ndarray:
        """Bit matrix G of coordinate ``i`` (1-based); G[r-1, j-1] is bit r of nu_j."""
        mu = self.mu[i - 1]
        g = np.zeros((self.depth, self.depth), dtype=np.uint8)
        for j in range(1, self.depth + 1):
            for r in range(1, j + 1):
                g[r - 1, j - 1] = (mu[j - 1] >> (j - r)) & 1
        return g


def build_sobol_matrices(records: dict[int, SobolRecord] | None, dim: int,
                         depth: int = DEFAULT_DEPTH) -> SobolParams:
    if not 1 <= depth <= 63:
        raise ValueError(f"Sobol' depth must be in [1, 63], got {depth}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if records is None:
        records = load_sobol_records()
    degrees, coeffs, mus = [1], [0], [tuple([1] * depth)]
    for i in range(2, dim + 1):
        rec = records.get(i)
        if rec is None:
            raise ValueError(f"no Sobol' parameters for dimension {i} (parameter file covers "
                             f"{min(records, default=0)}..{max(records, default=0)})")
        degrees.append(rec.degree)
        coeffs.append(rec.a)
        mus.append(tuple(direction_integers(rec, depth)))
    directions = np.array([[m << (depth - j) for j, m in enumerate(mu, 1)] for mu in mus],
                          dtype=np.uint64)
    directions.setflags(write=False)
    return SobolParams(dim, depth, tuple(degrees), tuple(coeffs), tuple(mus), directions)


@lru_cache(maxsize=32)
def default_params(dim: int, depth: int = DEFAULT_DEPTH) -> SobolParams:
    return build_sobol_matrices(load_sobol_records(), dim, depth)


def sobol_ints(omegas: np.ndarray, params: SobolParams, dims: slice = slice(None)) -> np.ndarray:
    """y = G a(omega) over GF(2), packed as depth-bit integers, shape (n, d)."""
    v = params.directions[dims]
    omegas = np.asarray(omegas, dtype=np.uint64)
    out = np.zeros((omegas.size, v.shape[0]), dtype=np.uint64)
    top = int(omegas.max()).bit_length() if omegas.size else 0
    for bit in range(top):
        hit = ((omegas >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        out[hit] ^= v[:, bit]
    return out


def sobol_points(n: int, d: int, skip: int = DEFAULT_SKIP, params: SobolParams | None = None,
                 include_origin: bool = False, scramble: ScrambleSpec | None = NO_SCRAMBLE) -> PointSet:
    """Sobol' points with indices skip+1 .. skip+n (skip .. skip+n-1 with the origin flag)."""
    scramble = scramble or NO_SCRAMBLE
    if params is None:
        params = default_params(d)
    if params.dim < d:
        raise ValueError(f"parameters cover {params.dim} dimensions, {d} requested")
    omegas = indices(n, skip, include_origin)
    if int(omegas[-1]) >= 1 << params.depth:
        raise ValueError(f"index {int(omegas[-1])} overflows {params.depth}-bit Sobol' digits")
    ints = sobol_ints(omegas, params, slice(0, d))
    ints, depth = scramble_base2(ints, params.depth, scramble)
    src = partial(sobol_points, n, d, skip, params, include_origin)
    return PointSet(base2_to_unit(ints, depth), "sobol", (2,) * d, skip, include_origin,
                    scramble, source=src)
