# %% [markdown]
# # Low-discrepancy point sets
#
# Radical inverses, Halton, Faure and Sobol' points, what scrambling does to
# them, and how their star discrepancy compares with pseudo-random points.

# %%
import numpy as np

from qmcpricing.lds import ScrambleSpec, faure_points, halton_points, sobol_points, van_der_corput
from qmcpricing.pricing import mc_points
from qmcpricing.uniformity import star_discrepancy_exact, uniformity_chi_square

# %% [markdown]
# The Van der Corput sequence reflects the base-b digits of the index about
# the radix point. Index 1 gives 0.5, index 2 gives 0.25, and so on.

# %%
print(van_der_corput(8, 2).coords.ravel())

# %% [markdown]
# Halton uses one prime base per coordinate. Faure uses a single base, the
# smallest prime >= d, and scrambles digits with powers of the Pascal matrix.

# %%
print(halton_points(4, 3).coords)
print(faure_points(4, 3, skip=0).coords)

# %% [markdown]
# A block of 2^k Sobol' points that starts at a multiple of 2^k puts exactly
# one point in every dyadic interval of length 2^-k, in every coordinate.
# Nested-uniform (Owen) scrambling keeps that property.

# %%
k = 6
for label, spec in [("plain", None), ("owen", ScrambleSpec("owen", 7))]:
    pts = sobol_points(2 ** k, 8, skip=2 ** k - 1, scramble=spec).coords
    counts = [np.bincount((pts[:, j] * 2 ** k).astype(int), minlength=2 ** k) for j in range(8)]
    print(label, all(np.all(c == 1) for c in counts))

# %% [markdown]
# Exact star discrepancy of 64 points in the unit square.

# %%
for name, pts in [("sobol", sobol_points(64, 2)), ("halton", halton_points(64, 2)),
                  ("faure", faure_points(64, 2)), ("mc", mc_points(64, 2, seed=1))]:
    print(f"{name:<7} D* = {star_discrepancy_exact(pts).dstar:.4f}")

# %% [markdown]
# A coarser check that scales to large n: bin counts against uniform.

# %%
stat, p = uniformity_chi_square(sobol_points(2 ** 12, 2), 8)
print(f"chi-square {stat:.2f}, p-value {p:.3f}")
