"""
Displacement, quasi-centers and transfer to a factor
====================================================

lambda(S, x) is the largest distance a point x is moved by an element of the
finite set S.  It is convex along geodesics of a tree, so steepest descent
finds the exact minimum over vertices.
"""
from treegrowth import (
    CayleyTree, DirectProduct, FreeGroup, FreeProduct, MarkedSubset, ProductAction,
    conjugate_reduce, factor_transfer, make_tree, min_displacement, quasi_center,
)
from treegrowth.displacement import displacement

F2 = FreeGroup(2, ["a", "b"])
T = CayleyTree(F2)
S = MarkedSubset.from_words(F2, ["a", "b"])

# %%
# Minimum displacement, with the vertex attaining it.
print(min_displacement(S, T))

M = FreeProduct([2, 3], ["s", "t"])
print(min_displacement(MarkedSubset.from_words(M, ["s", "t"]), make_tree(M)))

# %%
# A quasi-center: a point on some [o, s o] displaced at most 6 times as much
# as an arbitrary point x (plus 3 for rounding midpoints to vertices).
x = T.parse_vertex("a b a b")
qc = quasi_center(S, T.base, x, T)
print("lambda(S, x) =", displacement(S, x, T), " z =", T.format_vertex(qc.z),
      " lambda(S, z) =", qc.value, " bound =", qc.bound)

# %%
# F2 x F2 acting on a product of two trees with the l1 metric.  Conjugating by
# a suitable g brings S close to the base point, within C1 (M + 1).
D = DirectProduct([F2, FreeGroup(2, ["c", "d"])])
P = ProductAction(D, [CayleyTree(D.factors[0]), CayleyTree(D.factors[1])])
S2 = MarkedSubset.from_words(D, ["a d", "b c"])
g, trace = conjugate_reduce(S2, P)
print("conjugator", trace.conjugator_label, " value", trace.value, "<=", trace.bound)

# %%
# A set that is large enough must displace some factor by more than M.  These
# eight elements move each factor by 1, which beats M = 0 but not M = 1.
big = MarkedSubset.from_words(D, ["a", "b", "c", "d", "a c", "a d", "b c", "b d"])
print(factor_transfer(big, P, 0))
print(factor_transfer(big, P, 1))
print(factor_transfer(MarkedSubset.from_words(D, ["1"]), P, 1))
