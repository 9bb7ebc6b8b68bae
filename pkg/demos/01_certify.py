# %% [markdown]
# # Certifying the hypotheses exactly
#
# A system is a finite list of piecewise-linear maps of [0, 1] with rational
# weights.  All certificates below are computed in exact rational arithmetic.

# %%
from fractions import Fraction

from randmaps import certify, check_mu_injectivity, example22_system, injectivity_profile

system = example22_system(Fraction(2, 5))
report = certify(system)
print(report)

# %% [markdown]
# The injectivity profile is the step function x -> sum_i w_i #g_i^{-1}(x).
# Its supremum is the margin.  The family is mu-injective when the margin is at most 1.

# %%
for locus, value in injectivity_profile(system).simplify().pieces():
    print(f"{locus!s:>14}  {value}")

# %% [markdown]
# Scan p.  The margin is 3 - 5p, so the threshold sits at p = 2/5.

# %%
for p in [Fraction(k, 20) for k in range(1, 10)]:
    ok, margin, where = check_mu_injectivity(example22_system(p))
    print(f"p={p!s:>5}  margin={margin!s:>5}  mu-injective={ok}  argmax={where}")
