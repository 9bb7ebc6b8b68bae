# %% [markdown]
# # Backward iteration collapses the invariant measure
#
# Push a sample of the invariant measure through g_1 o ... o g_n, applying the
# innermost map first.  The image shrinks to a point Theta(omega).  Averaging
# the Diracs at Theta over words recovers the invariant measure.

# %%
from fractions import Fraction

import numpy as np

from randmaps import WalkRng, example22_system, invariant_estimate
from randmaps.measure import quantile_prune
from randmaps.walk import backward_collapse, barycenter_check, geometric_schedule

system = example22_system(Fraction(2, 5))
nu = invariant_estimate(system, 2000, 400, 100).measure
sample = quantile_prune(nu.positions, nu.weights, 200)
rng = WalkRng(12345)

# %%
for n, diam, theta in backward_collapse(system, rng, sample, 400, geometric_schedule(400)):
    print(f"n={n:4d}  diameter={diam:.3e}  theta={theta:.6f}")

# %% [markdown]
# Barycenter check: W1 between the empirical law of Theta and the invariant estimate.

# %%
print("W1:", barycenter_check(system, WalkRng(7), nu, 500, 400, workers=4))
