"""Digit scrambling: random digital shift and nested uniform (Owen) scrambling.

Nested uniform scrambling never stores a permutation tree.  For every
coordinate a 64-bit key is derived from the seed; walking down the digits
of a point, the permutation applied to digit ``k`` is generated from a
state that has absorbed the key and the *original* digits ``1..k-1``
through :func:`mix64`.  Two points that share a digit prefix therefore
see the same permutation at the next level, which is exactly Owen's
construction.  In base 2 a permutation of {0, 1} is a single flip bit
(the top bit of the state); in base b it is a Fisher-Yates shuffle driven
by successive ``mix64`` draws.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .._mixing import GOLDEN, derive_seed, mix64_nb
from .pointset import PointSet, ScrambleSpec

MAX_BASE2_DEPTH = 63
_SHIFT_TAG = 0x5348494654  # "SHIFT"


def coordinate_keys(seed: int, d: int, offset: int = 0) -> np.ndarray:
    return np.array([derive_seed(seed, "coord", offset + j) for j in range(d)], dtype=np.uint64)


@njit(cache=True)
def _owen_base2(ints, depth, keys):
    n, d = ints.shape
    out = np.empty_like(ints)
    one = np.uint64(1)
    gold = np.uint64(GOLDEN)
    for i in range(n):
        for j in range(d):
            x = ints[i, j]
            state = keys[j]
            y = np.uint64(0)
            for k in range(depth):
                shift = np.uint64(depth - 1 - k)
                bit = (x >> shift) & one
                flip = state >> np.uint64(63)
                y |= (bit ^ flip) << shift
                state = mix64_nb(state ^ ((bit + one) * gold))
            out[i, j] = y
    return out


@njit(cache=True)
def _owen_digits(digits, bases, keys):
    n, d, depth = digits.shape
    out = np.empty_like(digits)
    perm = np.empty(bases.max(), dtype=np.int64)
    gold = np.uint64(GOLDEN)
    for i in range(n):
        for j in range(d):
            b = bases[j]
            state = keys[j]
            for k in range(depth):
                a = digits[i, j, k]
                for t in range(b):
                    perm[t] = t
                s = state
                for t in range(b - 1, 0, -1):
                    s = mix64_nb(s + gold)
                    r = np.int64(((s >> np.uint64(32)) * np.uint64(t + 1)) >> np.uint64(32))
                    tmp = perm[t]
                    perm[t] = perm[r]
                    perm[r] = tmp
                out[i, j, k] = perm[a]
                state = mix64_nb(state ^ (np.uint64(a + 1) * gold))
    return out


def scramble_base2(ints: np.ndarray, native_depth: int, spec: ScrambleSpec,
                   coord_offset: int = 0) -> tuple[np.ndarray, int]:
    """Scramble packed base-2 digits; returns (ints, depth) of the result.

    ``ints[i, j] / 2**native_depth`` is the unscrambled coordinate, most
    significant digit first.
    """
    depth = native_depth if spec.depth is None else spec.depth
    if depth < native_depth:
        raise ValueError(f"scramble depth {depth} is below the input's native depth {native_depth}")
    if depth > MAX_BASE2_DEPTH:
        raise ValueError(f"base-2 scramble depth is capped at {MAX_BASE2_DEPTH}")
    ints = np.ascontiguousarray(ints, dtype=np.uint64) << np.uint64(depth - native_depth)
    if not spec.active:
        return ints, depth
    keys = coordinate_keys(spec.seed, ints.shape[1], coord_offset)
    if spec.mode == "digital-shift":
        shifts = np.array([derive_seed(int(k), _SHIFT_TAG) >> (64 - depth) for k in keys], dtype=np.uint64)
        return ints ^ shifts[None, :], depth
    return _owen_base2(ints, depth, keys), depth


def scramble_digits(digits: np.ndarray, bases: np.ndarray, spec: ScrambleSpec,
                    coord_offset: int = 0) -> np.ndarray:
    """Scramble an (n, d, depth) array of base-b digits, most significant first."""
    depth = digits.shape[2]
    if spec.depth is not None and spec.depth > depth:
        pad = np.zeros(digits.shape[:2] + (spec.depth - depth,), dtype=np.int64)
        digits = np.concatenate([digits, pad], axis=2)
    elif spec.depth is not None and spec.depth < depth:
        raise ValueError(f"scramble depth {spec.depth} is below the input's native depth {depth}")
    digits = np.ascontiguousarray(digits, dtype=np.int64)
    bases = np.asarray(bases, dtype=np.int64)
    if not spec.active:
        return digits
    keys = coordinate_keys(spec.seed, digits.shape[1], coord_offset)
    if spec.mode == "digital-shift":
        k = np.arange(digits.shape[2], dtype=np.uint64)
        shifts = np.empty(digits.shape[1:], dtype=np.int64)
        for j, key in enumerate(keys):
            raw = [derive_seed(int(key), _SHIFT_TAG, int(level)) for level in k]
            shifts[j] = np.array([r % int(bases[j]) for r in raw])
        return (digits + shifts[None]) % bases[None, :, None]
    return _owen_digits(digits, bases, keys)


def base2_to_unit(ints: np.ndarray, depth: int) -> np.ndarray:
    """Exact conversion of depth-bit integers to floats in [0, 1).

    Digits below 2**-53 are truncated so the result can never round up to 1.
    """
    ints = np.asarray(ints, dtype=np.uint64)
    if depth > 53:
        ints = ints >> np.uint64(depth - 53)
        depth = 53
    return ints.astype(np.float64) * 2.0 ** -depth


def digits_to_unit(digits: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Assemble sum_m y_m b^-m by Horner's rule from the least significant digit up."""
    bases = np.asarray(bases, dtype=np.float64)
    x = np.zeros(digits.shape[:2])
    for k in range(digits.shape[2] - 1, -1, -1):
        x = (x + digits[:, :, k]) / bases
    return x


def apply_scramble(points, spec: ScrambleSpec) -> PointSet:
    """Randomize a point set (or a generator callable) according to ``spec``.

    ``points`` is either a :class:`PointSet` produced by one of the
    generators in this package, or a callable accepting a ``scramble``
    keyword and returning a PointSet.  Scrambling works on the exact
    digits, so the generator is re-run rather than the floats decoded.
    """
    if callable(points) and not isinstance(points, PointSet):
        return points(scramble=spec)
    if not spec.active:
        return points
    if points.scramble.active:
        raise ValueError("point set is already scrambled")
    if points.source is None:
        raise ValueError(f"point set of family {points.family!r} carries no digit expansion to scramble")
    return points.source(scramble=spec)
