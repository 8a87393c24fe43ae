"""
Counting product sets
=====================

|U^n| is counted exactly by growing U^n = U^(n-1) U layer by layer and
deduplicating normal forms.  Growth inequalities |U^n| >= (alpha |U|)^(beta n)
are then decided with integer arithmetic.
"""
from fractions import Fraction

from treegrowth import FreeGroup, MarkedSubset, commutator_set, growth_rate, product_set_counts, psg_check
from treegrowth.schreier import chain_psg_bound

F2 = FreeGroup(2, ["a", "b"])
sym = MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"])

# %%
# The symmetric generating set: |U^<=n| = 2 3^n - 1.
series = product_set_counts(sym, 10)
print("counts    ", series.counts)
print("cumulative", series.cumulative)

# %%
# Growth-rate estimates.  The n-th roots decrease towards 3, but slowly:
# (2 3^n)^(1/n) = 3 2^(1/n).
rate = growth_rate(series)
for n in (1, 5, 10):
    print(f"n = {n:2d}: root {rate.roots[n - 1]:.4f}  ratio {rate.ratios[n - 1]:.4f}")

# %%
# An exact growth inequality and its chained form through a subgroup of index 2.
fit = psg_check(series, Fraction(1, 2), Fraction(1, 2))
print("psg (1/2, 1/2) holds for all n:", fit.satisfied, " largest beta:", round(fit.max_beta, 4))
chain = chain_psg_bound(series, 2, Fraction(1, 2), Fraction(1, 2), kernel_order=2)
print("chained bound holds:", chain.satisfied, " r =", chain.r)

# %%
# Commutator sets C(S^<=n, S^<=n) grow at least linearly.
print("commutators", commutator_set(sym, 4).sizes)
