# %% [markdown]
# # Central limit behaviour of Birkhoff sums
#
# S_n = (phi(X_1) + ... + phi(X_n)) / sqrt(n) for phi(x) = x, centred against the
# invariant estimate.  The variance is stable in n and the law is close to Gaussian
# from every start point.

# %%
from fractions import Fraction

from randmaps import WalkRng, example22_system, invariant_estimate
from randmaps.clt import Observable, center_observable, estimate_sigma2, ks_normality, prop61_diagnostic, sample_Sn

system = example22_system(Fraction(2, 5))
nu = invariant_estimate(system, 2000, 400, 100).measure
phi = center_observable(Observable.identity(), nu)
rng = WalkRng(11)

# %%
est = estimate_sigma2(system, phi, nu, 1000, 5000, rng, workers=4)
print(f"sigma^2: n=1000 {est.sigma2:.4f} +- {est.stderr:.4f}   n=2000 {est.sigma2_2n:.4f} +- {est.stderr_2n:.4f}")

# %%
for x in (0.0, 0.3, 0.7, 1.0):
    s = sample_Sn(system, phi, x, 2000, 5000, rng, workers=4)
    print(f"x={x}: sigma2_hat={s.sigma2_hat:.4f}  KS={ks_normality(s):.4f}")

# %% [markdown]
# The partial sums of U^i phi(x) - U^i phi(y) stay bounded.

# %%
diag = dict(prop61_diagnostic(system, Observable.identity(), 0.1, 0.9, 200, 5000, WalkRng(3), workers=4))
print({n: round(diag[n], 4) for n in (1, 5, 10, 50, 100, 200)})
