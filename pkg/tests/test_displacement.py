import pytest
from hypothesis import given, strategies as st

from treegrowth.displacement import (
    ProductAction,
    conjugate_reduce,
    displacement,
    displacement_at,
    factor_transfer,
    min_displacement,
    min_displacement_exhaustive,
    min_on_segments,
    orbit_displacement_upper,
    quasi_center,
)
from treegrowth.groups import DirectProduct, FreeGroup, FreeProduct, GroupError, MarkedSubset
from treegrowth.trees import CayleyTree, StarTree, make_tree

from conftest import free_elements, product_elements

F2 = FreeGroup(2, ["a", "b"])
F2b = FreeGroup(2, ["c", "d"])
M = FreeProduct([2, 3], ["s", "t"])
CAY = CayleyTree(F2)
BS = make_tree(M)
D = DirectProduct([F2, F2b])
P = ProductAction(D, [CayleyTree(F2), CayleyTree(F2b)])


def bfs_ball(A, center, radius):
    """Vertices within ``radius`` of ``center``, found by walking neighbours."""
    seen, layer = {center}, [center]
    for _ in range(radius):
        nxt = []
        for v in layer:
            for w in A.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        layer = nxt
    return seen


def brute_min(S, A):
    lam = lambda v: max(A.dist(v, A.act(s, v)) for s in S)
    return min(lam(v) for v in bfs_ball(A, A.base, lam(A.base)))


def U(G, *words):
    return MarkedSubset.from_words(G, list(words))


# -- evaluation ----------------------------------------------------------------------


def test_displacement_examples():
    assert displacement_at(U(F2, "a", "b"), CAY.base, CAY).value == 1
    assert displacement_at(U(F2, "1"), CAY.parse_vertex("a b"), CAY).value == 0
    r = displacement_at(U(D, "a", "d"), P.base, P)
    assert r.value == 1 and r.factor_values == (1, 1)
    with pytest.raises(ValueError):
        displacement_at(MarkedSubset.__new__(MarkedSubset), CAY.base, CAY)


@given(st.lists(st.tuples(free_elements(F2, 4), free_elements(F2b, 4)), min_size=1, max_size=4))
def test_product_displacement_sits_between_factor_max_and_sum(pairs):
    S = MarkedSubset(D, tuple(pairs))
    r = displacement_at(S, P.base, P)
    assert max(r.factor_values) <= r.value <= sum(r.factor_values)


@given(st.lists(free_elements(F2, 5), min_size=1, max_size=4), free_elements(F2, 4))
def test_monotone_under_inclusion(elems, extra):
    S = MarkedSubset(F2, tuple(elems))
    S2 = MarkedSubset(F2, tuple(elems) + (extra,))
    v = CAY.parse_vertex("b a")
    assert displacement(S, v, CAY) <= displacement(S2, v, CAY)


# -- global minimum ---------------------------------------------------------------------


def test_min_displacement_examples():
    assert min_displacement(U(F2, "a", "b"), CAY).min_value == 1
    r = min_displacement(U(M, "s", "t"), BS)
    assert r.min_value == 2
    # on the subdivision the edge vertex 1 between <s> and <t> does better:
    # 2 subdivided edges, i.e. displacement 1 in the original metric
    star = min_displacement(U(M, "s", "t"), StarTree(M))
    assert star.min_value == 2 and star.minimizer_label == "1"
    e = min_displacement(U(M, "s"), BS)
    assert e.min_value == 0
    assert BS.act(M.parse("s"), e.minimizer) == e.minimizer


@given(st.lists(free_elements(F2, 6), min_size=1, max_size=4))
def test_descent_matches_ball_oracle_on_cayley_tree(elems):
    S = MarkedSubset(F2, tuple(elems))
    r = min_displacement(S, CAY)
    assert r.min_value == brute_min(S, CAY)
    assert displacement(S, r.minimizer, CAY) == r.min_value


@given(st.lists(product_elements(M, 5), min_size=1, max_size=4))
def test_descent_matches_ball_oracle_on_bass_serre_tree(elems):
    S = MarkedSubset(M, tuple(elems))
    r = min_displacement(S, BS)
    assert r.min_value == brute_min(S, BS)
    assert r.min_value == min_displacement_exhaustive(S, BS)[0]


@given(st.lists(free_elements(F2, 5), min_size=1, max_size=3), free_elements(F2, 4))
def test_conjugation_does_not_change_the_minimum(elems, g):
    S = MarkedSubset(F2, tuple(elems))
    T = MarkedSubset(F2, tuple(F2.mul(F2.mul(F2.inv(g), s), g) for s in elems))
    assert min_displacement(S, CAY).min_value == min_displacement(T, CAY).min_value


# -- quasi-centers ---------------------------------------------------------------------


def test_quasi_center_example():
    S = U(F2, "a", "b")
    x = CAY.parse_vertex("a b a b")
    qc = quasi_center(S, CAY.base, x, CAY)
    assert qc.value <= 6 * displacement(S, x, CAY)
    assert qc.value >= min_on_segments(S, CAY.base, CAY)


def test_quasi_center_degenerate_segment():
    S = U(F2, "a")
    qc = quasi_center(S, CAY.base, CAY.base, CAY)
    assert qc.value <= 6 * displacement(S, CAY.base, CAY)


@given(st.lists(product_elements(M, 5), min_size=1, max_size=4), product_elements(M, 3))
def test_quasi_center_lies_on_a_segment_and_meets_the_bound(elems, xw):
    S = MarkedSubset(M, tuple(elems))
    x = BS.act(xw, BS.base)
    o = BS.base
    qc = quasi_center(S, o, x, BS)
    so = BS.act(qc.s, o)
    assert qc.s in S.elements
    assert BS.dist(o, qc.z) + BS.dist(qc.z, so) == BS.dist(o, so)
    assert qc.value <= 6 * displacement(S, x, BS) + 3


# -- conjugation reduction and transfer ----------------------------------------------------


def test_conjugate_reduce_meets_the_recursion_bound():
    S = U(D, "a d", "b c")
    g, trace = conjugate_reduce(S, P)
    assert trace.D == 0 and trace.C1 == 36
    conj = [D.mul(D.mul(D.inv(g), s), g) for s in S]
    assert max(P.dist(P.base, P.act(c, P.base)) for c in conj) == trace.value <= trace.bound


def test_sandwich_with_orbit_upper_bound():
    S = U(D, "a d", "b c")
    _, trace = conjugate_reduce(S, P)
    upper, _ = orbit_displacement_upper(S, P, radius=3)
    lam_X = max(trace.M, 0)
    assert lam_X <= upper <= trace.C1 * lam_X + trace.C1


def test_centered_set_needs_no_conjugator():
    F1 = FreeGroup(1, ["x"])
    D1 = DirectProduct([F1])
    P1 = ProductAction(D1, [CayleyTree(F1)])
    g, trace = conjugate_reduce(U(D1, "x"), P1)
    assert g == D1.identity and trace.holds


def test_conjugate_reduce_rejects_unsupported_trees():
    from treegrowth.trees import SubdividedTree
    D1 = DirectProduct([F2])
    P1 = ProductAction(D1, [SubdividedTree(CayleyTree(F2))])
    with pytest.raises(GroupError):
        conjugate_reduce(U(D1, "a"), P1)


def test_factor_transfer_examples():
    S = U(D, "a", "b", "c", "d", "a c", "a d", "b c", "b d")
    assert factor_transfer(S, P, 0).succeeded
    r = factor_transfer(U(D, "a", "a^2"), P, 1)
    assert r.factor == 1 and r.values == (2, 0)
    r = factor_transfer(U(D, "1"), P, 0)
    assert not r.succeeded and r.values == (0, 0)


@given(st.lists(st.tuples(free_elements(F2, 4), free_elements(F2b, 4)), min_size=1, max_size=5),
       st.integers(0, 3))
def test_transfer_values_match_factor_oracles(pairs, m):
    S = MarkedSubset(D, tuple(pairs))
    r = factor_transfer(S, P, m)
    want = tuple(brute_min(P.factor_subset(S, i), t) for i, t in enumerate(P.factors))
    assert r.values == want
    assert r.factor == next((i + 1 for i, v in enumerate(want) if v > m), None)


def test_product_action_checks_factors():
    with pytest.raises(GroupError):
        ProductAction(D, [CayleyTree(F2)])
    with pytest.raises(GroupError):
        ProductAction(D, [CayleyTree(F2), CayleyTree(F2)])
