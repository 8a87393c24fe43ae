"""
Trees and translation lengths
=============================

Free groups act on their Cayley trees and free products of cyclic groups act
on Bass-Serre trees.  On a tree the translation length of g can be read off
from a single point: tau(g) = max(0, |o - g^2 o| - |o - g o|).
"""
from treegrowth import BassSerreTree, CayleyTree, FreeGroup, FreeProduct, translation_length
from treegrowth.trees import fingerprint, loxodromic_criterion, same_endpoint_pair

# %%
# The free group on a, b and its Cayley tree.  Vertices are reduced words.
F2 = FreeGroup(2, ["a", "b"])
T = CayleyTree(F2)

for w in ["a", "a b", "b a b^-1", "a b a^-1 b^-1", "a a^-1"]:
    t = translation_length(F2.parse(w), T)
    print(f"{w:>16}  tau = {t.tau}  {t.kind}")

# %%
# A conjugate of a has the same axis type but a different anchor: the axis
# of b a b^-1 passes through the vertex b.
print(fingerprint(T, F2.parse("b a b^-1")))

# %%
# The modular group Z/2 * Z/3.  Here s and t each fix a vertex, but st
# translates by 2 along its axis.
M = FreeProduct([2, 3], ["s", "t"])
B = BassSerreTree(M)
for w in ["s", "t", "s t", "s t s t^2"]:
    g = M.parse(w)
    print(f"{w:>10}  tau = {translation_length(g, B).tau}  "
          f"criterion at o: {loxodromic_criterion(g, B.base, B)}")

# %%
# Powers and inverses of a loxodromic element share its endpoint pair;
# a and b do not.
a, b = F2.parse("a"), F2.parse("b")
print("a, a^3 :", same_endpoint_pair(a, F2.parse("a^3"), T))
print("a, b   :", same_endpoint_pair(a, b, T))
