# %% [markdown]
# # The invariant measure and asymptotic stability
#
# The Markov operator pushes an atomic measure through every map.  It then
# re-quantises to a fixed number of atoms, moving mass by at most 1/n in W1.

# %%
from fractions import Fraction

import numpy as np

from randmaps import AtomMeasure, example22_system, invariant_estimate, max_window_mass
from randmaps.walk import stability_experiment

system = example22_system(Fraction(2, 5))
est = invariant_estimate(system, prune_to=2000, steps=400, burn_in=100)
print(est.measure, "residual", est.residual)

# %% [markdown]
# No window of width 0.01 carries much mass, so the estimate has no atoms.
# The mass sits on the middle-thirds Cantor set: phi2 and phi3 are the inverse
# branches of phi1, so that set is mapped into itself.

# %%
print("max mass in a 0.01 window:", max_window_mass(est.measure, 0.01))
t = np.linspace(0, 1, 11)
print(np.round(est.measure.cdf(t), 3))

# %% [markdown]
# Two Dirac starts forget where they began.

# %%
trace = stability_experiment(system, AtomMeasure.dirac(0.1), AtomMeasure.dirac(0.9), 200, 2000)
for k in (0, 1, 5, 10, 50, 100, 200):
    print(k, trace[k][1])
