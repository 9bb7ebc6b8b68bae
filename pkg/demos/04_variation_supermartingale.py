# %% [markdown]
# # Variation of backward compositions
#
# For a mu-injective family, the expected variation after one more map never
# exceeds the current variation.  The walk therefore stays bounded in expectation,
# even though phi1 alone triples the variation at every step.

# %%
from fractions import Fraction

from randmaps import WalkRng, example22_system
from randmaps.walk import sample_word, supermartingale_step_check, variation_trace

for p in (Fraction(2, 5), Fraction(1, 5)):
    system = example22_system(p)
    print(f"p={p}: one-step expectation from the identity =", supermartingale_step_check(system, []).lhs)

# %%
system = example22_system(Fraction(2, 5))
rng = WalkRng(1)
for trial in range(5):
    word = list(sample_word(rng, system, 8, trial))
    trace = variation_trace(system, word)
    print(" ".join(system.labels[i] for i in word))
    print("   V_k:", [str(v) for v in trace])
    print("   E[V_k+1 | F_k] <= V_k:", all(supermartingale_step_check(system, word[:k], injective=True).holds for k in range(9)))
