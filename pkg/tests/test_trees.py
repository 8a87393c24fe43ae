from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treegrowth.groups import FreeGroup, FreeProduct, GroupError, group_ball
from treegrowth.trees import (
    BassSerreTree,
    CayleyTree,
    StarTree,
    axes_equal,
    axis_projection,
    fingerprint,
    gromov_product,
    independent,
    loxodromic_criterion,
    make_tree,
    same_endpoint_pair,
    translation_length,
    translation_length_value,
)

from conftest import bfs_dist, free_elements, product_elements

F2 = FreeGroup(2, ["a", "b"])
M = FreeProduct([2, 3], ["s", "t"])
TREES = [CayleyTree(F2), BassSerreTree(M), StarTree(M)]


def _vertex(A, g):
    return A.act(g, A.base)


# -- metric ----------------------------------------------------------------------


@given(free_elements(F2, 5), free_elements(F2, 5))
def test_cayley_distance_matches_bfs(g, h):
    A = TREES[0]
    assert A.dist(_vertex(A, g), _vertex(A, h)) == bfs_dist(A, _vertex(A, g), _vertex(A, h))


@pytest.mark.parametrize("A", TREES[1:], ids=["bass-serre", "star"])
@given(data=st.data())
def test_free_product_tree_distance_matches_bfs(A, data):
    g = data.draw(product_elements(M, 4))
    h = data.draw(product_elements(M, 4))
    u, v = _vertex(A, g), _vertex(A, h)
    assert A.dist(u, v) == bfs_dist(A, u, v)


@pytest.mark.parametrize("A", TREES, ids=["cayley", "bass-serre", "star"])
def test_action_is_isometric_on_a_ball(A):
    G = A.group
    pts = A.ball(A.base, 3)
    for g in group_ball(G, 2):
        for u in pts[:12]:
            for v in pts[:12]:
                assert A.dist(A.act(g, u), A.act(g, v)) == A.dist(u, v)


@pytest.mark.parametrize("A", TREES, ids=["cayley", "bass-serre", "star"])
def test_geodesics_are_paths(A):
    pts = A.ball(A.base, 3)
    for u in pts[:10]:
        for v in pts[-10:]:
            path = A.geodesic(u, v)
            assert path[0] == u and path[-1] == v
            assert all(A.dist(x, y) == 1 for x, y in zip(path, path[1:]))
            assert len(path) == A.dist(u, v) + 1


def test_vertex_text_round_trip():
    for A in TREES:
        for v in A.ball(A.base, 3):
            assert A.parse_vertex(A.format_vertex(v)) == v


def test_subdivision_doubles_distances():
    for A in TREES:
        A2 = A.subdivision()
        pts = A.ball(A.base, 2)
        for u in pts[:8]:
            for v in pts:
                assert A2.dist(A.to_subdivision(u), A.to_subdivision(v)) == 2 * A.dist(u, v)
                assert A.from_subdivision(A.to_subdivision(v)) == v


def test_bass_serre_tree_is_the_collapsed_star_tree():
    A = BassSerreTree(M)
    assert isinstance(A.subdivision(), StarTree)
    x = M.parse("s t")
    # vertex <s> is the coset of <s>; st moves it two edges on the Bass-Serre tree
    assert A.dist(A.base, A.act(x, A.base)) == 2
    S = StarTree(M)
    assert S.dist(S.base, S.act(x, S.base)) == 4


def test_gromov_product_is_distance_to_geodesic():
    A = TREES[0]
    a, c, b = (_vertex(A, F2.parse(w)) for w in ("a b", "a b^-1 a", "1"))
    assert gromov_product(A, a, c, b) == 1
    assert gromov_product(A, a, a, b) == A.dist(a, b)
    assert isinstance(gromov_product(A, a, c, b), Fraction)


def test_make_tree_rejects_unsupported_kinds():
    with pytest.raises(GroupError):
        make_tree(F2, "bass-serre")
    with pytest.raises(GroupError):
        make_tree(M, "cayley")
    assert isinstance(make_tree(FreeProduct([2, 2, 2])), StarTree)


# -- translation lengths --------------------------------------------------------------


@given(free_elements(F2))
def test_cayley_translation_length_is_cyclic_reduction_length(g):
    assert translation_length(g, TREES[0]).tau == len(F2.cyclic_reduction(g)[1])


@given(product_elements(M), st.integers(1, 4))
def test_translation_length_is_homogeneous(g, n):
    A = TREES[1]
    assert translation_length(M.power(g, n), A).tau == n * translation_length(g, A).tau


@given(free_elements(F2), free_elements(F2))
def test_translation_length_is_a_conjugacy_invariant(g, h):
    A = TREES[0]
    assert translation_length(F2.conj(h, g), A).tau == translation_length(g, A).tau


@given(free_elements(F2, 6))
def test_translation_length_is_min_displacement_over_a_ball(g):
    A = TREES[0]
    tau = translation_length(g, A).tau
    best = min(A.dist(v, A.act(g, v)) for v in A.ball(A.base, len(g)))
    assert best == tau


@pytest.mark.parametrize("A", TREES, ids=["cayley", "bass-serre", "star"])
def test_tau_does_not_depend_on_the_base_point(A):
    G = A.group
    for g in list(group_ball(G, 3))[:40]:
        taus = {translation_length_value(A, g, v) for v in A.ball(A.base, 2)}
        assert len(taus) == 1


def test_elliptic_elements_carry_a_witness():
    A = TREES[1]
    t = translation_length(M.parse("t"), A)
    assert not t.loxodromic and t.kind == "elliptic"
    assert A.act(M.parse("t"), t.fixed_vertex) == t.fixed_vertex
    # the base vertex is the coset <s>, which s fixes
    assert translation_length(M.parse("s"), A).fixed_vertex == A.base


def test_modular_group_examples():
    A = TREES[1]
    assert translation_length(M.parse("s t"), A).tau == 2
    assert translation_length(M.parse("s t s t^2"), A).tau == 4


# -- loxodromic criterion and axes ------------------------------------------------------


@pytest.mark.parametrize("A", TREES, ids=["cayley", "bass-serre", "star"])
def test_criterion_agrees_with_translation_length(A):
    G = A.group
    for g in group_ball(G, 4):
        for o in A.ball(A.base, 1):
            assert loxodromic_criterion(g, o, A) == (translation_length_value(A, g) > 0)


def test_strictness_matters_for_elements_fixing_the_base():
    A = TREES[1]
    s = M.parse("s")
    # s fixes o, so |o - so| = 0 = 2 <o, s^2 o>_{so}: equality, not loxodromic
    assert not loxodromic_criterion(s, A.base, A)


def test_fingerprints_identify_axes():
    A = TREES[0]
    g = F2.parse("b a b^-1")
    fp = fingerprint(A, g)
    assert fp.core == "a" and fp.anchor == "b" and fp.translation == 1
    assert fingerprint(A, F2.parse("a b")).core == fingerprint(A, F2.parse("b a")).core
    assert fingerprint(A, F2.parse("a^2")).core == "a"


def test_axis_projection_lies_on_the_axis():
    A = TREES[0]
    g = F2.parse("b a^2 b^-1")
    p = axis_projection(A, g, A.base)
    assert A.dist(p, A.act(g, p)) == 2


def test_endpoint_pairs():
    A = TREES[0]
    a, b = F2.parse("a"), F2.parse("b")
    assert same_endpoint_pair(a, F2.parse("a^3"), A)
    assert same_endpoint_pair(a, F2.parse("a^-1"), A)
    assert not same_endpoint_pair(a, b, A)
    assert axes_equal(A, a, F2.parse("a^-2"))
    assert independent(a, F2.parse("b a b^-1"), A)
    with pytest.raises(ValueError):
        same_endpoint_pair(F2.identity, a, A)


@given(free_elements(F2), free_elements(F2))
def test_axis_equality_agrees_with_commuting_for_free_groups(g, h):
    A = TREES[0]
    if translation_length_value(A, g) == 0 or translation_length_value(A, h) == 0:
        return
    # in a free group two elements share an axis iff they commute
    assert axes_equal(A, g, h) == (F2.mul(g, h) == F2.mul(h, g))
