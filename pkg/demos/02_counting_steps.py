# %% [markdown]
# Step counts line up across calculi.
#
# Fireball steps map to multiplicative steps one for one, and the total
# substitution-calculus length stays within twice the fireball length.

# %%
from collections import Counter

from ocbv.engines import NORMAL, Rule, evaluate
from ocbv.harness import GenConfig, all_maximal_derivations, gen_term
from ocbv.terms import parse_term, print_term
from ocbv.translations import complete_with_evar, simulate_fire_derivation

ratios = []
for seed in range(300):
    t = gen_term(GenConfig(seed=seed, max_size=20))
    d = evaluate(t, "fire", fuel=200)
    if d.status != NORMAL or not len(d):
        continue
    e = complete_with_evar(simulate_fire_derivation(d).target)
    assert e.m == len(d) and e.count(Rule.EXP_ABS) == d.count(Rule.BETA_ABS)
    ratios.append(len(e) / len(d))

print(f"{len(ratios)} normalizing terms; |vsub| / |fire| ranges over [{min(ratios):.2f}, {max(ratios):.2f}]")

# %% [markdown]
# The shuffling calculus is not strongly confluent: two normalizing runs of
# the same term can differ in length.  They still fire the same number of
# beta steps.

# %%
t = parse_term(r"(\y.z) ((\x.x x) (z z)) (\x.x x)")
runs, _ = all_maximal_derivations(t, "shuf", fuel=30)
print(print_term(t))
print("lengths:", Counter(len(d) for d in runs))
print("BetaShuf counts:", Counter(d.count(Rule.BETA_SHUF) for d in runs))
