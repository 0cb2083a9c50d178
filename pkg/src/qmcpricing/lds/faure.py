"""Faure sequences in a common prime base b >= d."""
from __future__ import annotations

from functools import lru_cache, partial

import numpy as np

from .pointset import NO_SCRAMBLE, PointSet, ScrambleSpec
from .radical import DEFAULT_DEPTH, MAX_DIM, PRIMES, index_digits, indices, n_digits
from .scramble import digits_to_unit, scramble_digits


def faure_base(d: int) -> int:
    """Smallest prime >= max(d, 2)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the cap of {MAX_DIM}")
    return next(p for p in PRIMES if p >= d)


def default_faure_skip(d: int) -> int:
    return faure_base(d) ** 4


@lru_cache(maxsize=None)
def _binomials_mod(b: int, depth: int) -> np.ndarray:
    """binom[k, m] = C(k, m) mod b for 0 <= m, k < depth."""
    c = np.zeros((depth, depth), dtype=np.int64)
    c[:, 0] = 1
    for k in range(1, depth):
        c[k, 1:] = (c[k - 1, 1:] + c[k - 1, :-1]) % b
    return c


def faure_generator_matrix(i: int, b: int, depth: int) -> np.ndarray:
    """Generator for coordinate ``i`` (1-based) from the digit formula.

    Entry [m, k] (0-based) is C(k, m) (i-1)^(k-m) mod b, so output digit
    y_{m+1} = sum_k entry[m, k] a_k mod b.
    """
    binom = _binomials_mod(b, depth)
    c = np.zeros((depth, depth), dtype=np.int64)
    for m in range(depth):
        for k in range(m, depth):
            c[m, k] = binom[k, m] * pow(i - 1, k - m, b) % b
    return c


def pascal_power_matrix(i: int, b: int, depth: int) -> np.ndarray:
    """(i-1)-th power of the upper-triangular Pascal matrix, reduced mod b."""
    pascal = _binomials_mod(b, depth).T.copy()
    result = np.eye(depth, dtype=np.int64)
    e = i - 1
    while e:
        if e & 1:
            result = result @ pascal % b
        pascal = pascal @ pascal % b
        e >>= 1
    return result


def faure_points(n: int, d: int, skip: int | None = None, include_origin: bool = False,
                 scramble: ScrambleSpec | None = NO_SCRAMBLE, depth: int | None = None) -> PointSet:
    """Faure points in base ``faure_base(d)``; ``skip`` defaults to b**4."""
    scramble = scramble or NO_SCRAMBLE
    b = faure_base(d)
    if skip is None:
        skip = b ** 4
    omegas = indices(n, skip, include_origin)
    depth = max(depth or scramble.depth or DEFAULT_DEPTH, n_digits(int(omegas[-1]), b))
    a = index_digits(omegas, b, depth)
    gens = np.stack([faure_generator_matrix(i, b, depth) for i in range(1, d + 1)])
    digits = np.einsum("nk,imk->nim", a, gens) % b
    bases = np.full(d, b)
    digits = scramble_digits(digits, bases, scramble)
    src = partial(faure_points, n, d, skip, include_origin, depth=depth)
    return PointSet(digits_to_unit(digits, bases), "faure", (b,) * d, skip,
                    include_origin, scramble, source=src)
