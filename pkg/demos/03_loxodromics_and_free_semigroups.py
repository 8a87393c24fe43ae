"""
Short loxodromics and free semigroups
=====================================

If a finite set S has no common fixed point, some element of S or S^2 is
loxodromic, and it moves a well chosen base point almost as far as S does.
Two loxodromics with different axes give a free semigroup, which is checked
here by enumerating every word up to a fixed length.
"""
from treegrowth import (
    CayleyTree, FreeGroup, FreeProduct, MarkedSubset, build_free_base,
    classify_action, make_tree, pingpong_pair, short_loxodromic,
)

M = FreeProduct([2, 3], ["s", "t"])
B = make_tree(M)

# %%
# Neither s nor t is loxodromic, so the certificate uses a product.
cert = short_loxodromic(MarkedSubset.from_words(M, ["s", "t"]), B)
for key, value in cert.record().items():
    print(f"{key:>12}: {value}")

# %%
# Classification of the action of <U>.
F2 = FreeGroup(2, ["a", "b"])
T = CayleyTree(F2)
for words, tree in ((["a", "b"], T), (["a"], T), (["s"], B)):
    G = tree.group
    c = classify_action(MarkedSubset.from_words(G, words), tree)
    print(words, "->", c.kind, c.witnesses)

# %%
# Ping-pong: a and b a b^-1 generate a free semigroup, so words of length n
# give 2^n distinct elements.
pp = pingpong_pair(F2.parse("a"), F2.parse("b a b^-1"), T, 6)
print(pp.labels, pp.counts)

# %%
# A free base T inside a bounded power of U = {a, b, a^-1, b^-1}.
fb = build_free_base(MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"]), T, 5)
print("T =", fb.labels)
print("counts", fb.counts, " kappa =", fb.parameters["kappa"])
