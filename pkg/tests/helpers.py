import numpy as np


def interval_counts(x, b, m):
    """Points per interval [j b^-m, (j+1) b^-m); boundary hits within 1e-9 count upward."""
    scaled = np.asarray(x, dtype=np.float64) * float(b) ** m
    near = np.round(scaled)
    idx = np.where(np.abs(scaled - near) < 1e-9, near, np.floor(scaled)).astype(np.int64)
    return np.bincount(idx, minlength=b ** m)


def balanced(coords, b, m):
    coords = np.atleast_2d(coords)
    return all(np.all(interval_counts(coords[:, j], b, m) == 1) for j in range(coords.shape[1]))
