# %% [markdown]
# # Small p: slow mixing between far-apart starts
#
# For p < 1/4 the family has at least two ergodic invariant measures.  One lives
# on the middle-thirds Cantor set C, which the three maps send into itself.  On C
# the Lyapunov exponent is (1 - 4p) log 3.  Below p = 1/4 it is positive, so C
# repels nearby points.  Starts off C then drift to a second measure.
#
# Two Dirac starts at 0.05 and 0.95 both lie off C.  They stay apart for tens of
# steps but end up at the same measure.

# %%
from fractions import Fraction
import math

from randmaps import AtomMeasure, example22_system
from randmaps.walk import bifurcation_experiment, stability_experiment

for p in (Fraction(1, 10), Fraction(1, 5), Fraction(2, 5)):
    print(f"p={p}: Lyapunov exponent on C = {(1 - 4 * float(p)) * math.log(3):+.3f}")

# %%
small = example22_system(Fraction(1, 10))
trace = stability_experiment(small, AtomMeasure.dirac(0.05), AtomMeasure.dirac(0.95), 200, 2000)
for k in (0, 10, 25, 50, 75, 100, 150, 200):
    print(k, round(trace[k][1], 4))

# %%
print(bifurcation_experiment(small, [0.05, 0.3, 0.5, 0.95], 200, 2000).round(4))
