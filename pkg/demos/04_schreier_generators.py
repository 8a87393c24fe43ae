"""
Generating finite-index subgroups from products of U
====================================================

A homomorphism to a permutation group describes a finite-index subgroup H:
either its kernel or the preimage of a point stabilizer.  The Schreier
construction produces generators of H that are short positive words in U.
"""
from treegrowth import FiniteQuotient, FreeGroup, MarkedSubset, Subgroup, coset_structure, schreier_generators

F2 = FreeGroup(2, ["a", "b"])

# %%
# Index 2: the kernel of a -> (1 2), b -> ().
U = MarkedSubset.from_words(F2, ["a", "b"])
Q = FiniteQuotient(F2, 2, {"a": "(1 2)", "b": "()"})
C = coset_structure(U, Q)
print("transversal:", [F2.format(x) for x in C.transversal])
res = schreier_generators(U, Q)
print("W =", res.labels)
print("longest witness", res.max_length, "<=", res.exponent_bound)

# %%
# A non-normal subgroup of index 3: the stabilizer of a point.
U3 = MarkedSubset.from_words(F2, ["a", "b", "b^-1 a^-1"])
Q3 = FiniteQuotient(F2, 3, {"a": "(1 2)", "b": "(1 2 3)"})
res3 = schreier_generators(U3, Q3, Subgroup("stabilizer", 0))
rec = res3.record(U3)
print("index", rec["index"], " |W| =", rec["size"], ">=", rec["size_bound"])
for g in rec["generators"][:5]:
    print(f"  {g['element']:>20} = {g['u_word']}")
print("checks:", {k: v for k, v in rec["checks"].items() if k in ("contained", "in_subgroup", "size", "generates")})
