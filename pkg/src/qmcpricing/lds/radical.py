"""Radical inverse, Van der Corput, Halton and Hammersley constructions."""
from __future__ import annotations

from functools import partial

import numpy as np

from .pointset import NO_SCRAMBLE, PointSet, ScrambleSpec
from .scramble import digits_to_unit, scramble_digits

MAX_DIM = 512
DEFAULT_DEPTH = 16


def _first_primes(count: int) -> tuple[int, ...]:
    limit = 4000
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return tuple(int(p) for p in np.flatnonzero(sieve)[:count])


PRIMES = _first_primes(MAX_DIM + 1)


def first_primes(d: int) -> tuple[int, ...]:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the prime table cap of {MAX_DIM}")
    return PRIMES[:d]


def digit_expansion(omega: int, b: int) -> list[int]:
    """Base-b digits of ``omega``, least significant first (empty for 0)."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if omega < 0:
        raise ValueError(f"index must be non-negative, got {omega}")
    digits = []
    while omega:
        omega, a = divmod(omega, b)
        digits.append(a)
    return digits


def radical_inverse(omega: int, b: int, include_origin: bool = False) -> float:
    """Reflect the base-b digits of ``omega`` about the radix point.

    >>> radical_inverse(6, 5)
    0.24
    """
    omega = int(omega)
    if omega == 0 and not include_origin:
        raise ValueError("radical_inverse(0) is the origin; pass include_origin=True to allow it")
    x = 0.0
    for a in reversed(digit_expansion(omega, b)):
        x = (x + a) / b
    return x


def n_digits(omega_max: int, b: int) -> int:
    return max(1, len(digit_expansion(int(omega_max), b)))


def index_digits(omegas: np.ndarray, b: int, depth: int) -> np.ndarray:
    """(n, depth) int64 array of base-b digits of each index, least significant first."""
    omegas = np.asarray(omegas, dtype=np.int64).copy()
    out = np.empty((omegas.size, depth), dtype=np.int64)
    for k in range(depth):
        omegas, out[:, k] = np.divmod(omegas, b)
    if np.any(omegas):
        raise ValueError(f"index exceeds {depth} base-{b} digits")
    return out


def indices(n: int, skip: int, include_origin: bool) -> np.ndarray:
    if n < 1:
        raise ValueError(f"count must be >= 1, got {n}")
    if skip < 0:
        raise ValueError(f"skip must be >= 0, got {skip}")
    start = skip if include_origin else skip + 1
    return np.arange(start, start + n, dtype=np.int64)


def _radical_digits(omegas: np.ndarray, bases, depth: int | None) -> np.ndarray:
    """(n, d, depth) output digits y_m = a_{m-1}(omega) for each base."""
    need = max(n_digits(int(omegas[-1]), b) for b in bases)
    depth = max(depth or DEFAULT_DEPTH, need)
    return np.stack([index_digits(omegas, b, depth) for b in bases], axis=1)


def _radical_points(n, bases, skip, include_origin, scramble, family, coord_offset=0):
    scramble = scramble or NO_SCRAMBLE
    omegas = indices(n, skip, include_origin)
    digits = _radical_digits(omegas, bases, scramble.depth)
    digits = scramble_digits(digits, np.array(bases), scramble, coord_offset)
    return digits_to_unit(digits, np.array(bases))


def van_der_corput(n: int, b: int = 2, skip: int = 0, include_origin: bool = False,
                   scramble: ScrambleSpec | None = NO_SCRAMBLE) -> PointSet:
    """First ``n`` Van der Corput points in base ``b`` after ``skip`` indices.

    Point ``j`` (0-based) is ``radical_inverse(skip + j + 1, b)``.
    """
    coords = _radical_points(n, (b,), skip, include_origin, scramble, "vdc")
    src = partial(van_der_corput, n, b, skip, include_origin)
    return PointSet(coords, "vdc", (b,), skip, include_origin, scramble or NO_SCRAMBLE, source=src)


def halton_points(n: int, d: int, skip: int = 0, include_origin: bool = False,
                  scramble: ScrambleSpec | None = NO_SCRAMBLE) -> PointSet:
    """Halton points: coordinate i uses the i-th prime as radical-inverse base."""
    bases = first_primes(d)
    coords = _radical_points(n, bases, skip, include_origin, scramble, "halton")
    src = partial(halton_points, n, d, skip, include_origin)
    return PointSet(coords, "halton", bases, skip, include_origin, scramble or NO_SCRAMBLE, source=src)


def hammersley_points(n: int, d: int) -> PointSet:
    """n-point Hammersley set: a centred ladder (j + 0.5)/n then d-1 Halton coordinates."""
    if d < 2:
        raise ValueError("Hammersley needs d >= 2; for d = 1 use van_der_corput")
    bases = first_primes(d - 1)
    ladder = (np.arange(n) + 0.5) / n
    rest = _radical_points(n, bases, 0, False, NO_SCRAMBLE, "hammersley")
    return PointSet(np.column_stack([ladder, rest]), "hammersley", bases)
