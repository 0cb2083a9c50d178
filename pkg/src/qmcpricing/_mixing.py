"""64-bit mixing used for every derived seed and scramble key.

``mix64`` is the SplitMix64 output finalizer.  ``derive_seed`` folds an
arbitrary tuple of integer/string keys into one 64-bit value by chaining
``mix64``; strings are folded byte by byte, so keys are stable across
interpreter runs (no reliance on ``hash()``).
"""
from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def _fold(state: int, value: int) -> int:
    return mix64((state + GOLDEN) ^ (value & MASK64))


def derive_seed(master: int, *keys: int | str) -> int:
    """Derive a 64-bit seed from ``master`` and a path of keys.

    >>> derive_seed(7, "mc", 3, 0) == derive_seed(7, "mc", 3, 0)
    True
    """
    state = mix64(master & MASK64)
    for key in keys:
        if isinstance(key, str):
            state = _fold(state, len(key) | (1 << 40))
            for byte in key.encode("utf-8"):
                state = _fold(state, byte)
        else:
            state = _fold(state, int(key))
    return state


@njit(cache=True, inline="always")
def mix64_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))
