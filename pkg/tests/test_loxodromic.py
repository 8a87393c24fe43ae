from itertools import product

import pytest
from hypothesis import given, strategies as st

from treegrowth.displacement import min_displacement
from treegrowth.errors import PreconditionError
from treegrowth.groups import FreeGroup, FreeProduct, MarkedSubset
from treegrowth.loxodromic import (
    build_free_base,
    classify_action,
    joint_loxodromic,
    local_to_global,
    pingpong_pair,
    short_loxodromic,
)
from treegrowth.trees import CayleyTree, make_tree, translation_length_value

from conftest import free_elements, product_elements

F2 = FreeGroup(2, ["a", "b"])
M = FreeProduct([2, 3], ["s", "t"])
CAY = CayleyTree(F2)
BS = make_tree(M)


def U(G, *words):
    return MarkedSubset.from_words(G, list(words))


def all_words_distinct(G, T, depth):
    """Brute force: every word of length <= depth over T has its own normal form."""
    seen = set()
    for n in range(depth + 1):
        for w in product(T, repeat=n):
            x = G.product(w)
            if x in seen:
                return False
            seen.add(x)
    return True


def cyclic_length(G, g):
    """Letters (or syllables) of the cyclic core, by repeated conjugation."""
    while len(g) >= 2 and len(G.mul(g[-1:], g[:1])) < 2:
        g = G.mul(G.mul(G.inv(g[:1]), g), g[:1])
    return len(g) if len(g) >= 2 or isinstance(G, FreeGroup) else 0


# -- short loxodromics -------------------------------------------------------------


def test_free_generators_give_a_at_once():
    c = short_loxodromic(U(F2, "a", "b"), CAY)
    assert c.label == "a" and c.u_length == 1 and c.distance == 1
    assert c.check(U(F2, "a", "b"), CAY) == []


def test_two_elliptics_give_their_product():
    c = short_loxodromic(U(M, "s", "t"), BS)
    assert c.label in ("s t", "t s") and c.tau == 2 and c.u_length == 2


def test_cancelling_pair_never_yields_the_identity():
    c = short_loxodromic(U(F2, "a", "a^-1"), CAY)
    assert c.label in ("a", "a^-1")


def test_global_fixed_point_is_a_precondition_failure():
    with pytest.raises(PreconditionError):
        short_loxodromic(U(M, "t", "t^2"), BS)


@pytest.mark.parametrize("G,A,elements", [
    (F2, CAY, free_elements(F2, 4)),
    (M, BS, product_elements(M, 4)),
], ids=["free", "modular"])
@given(data=st.data())
def test_certificate_against_independent_checks(G, A, elements, data):
    S = MarkedSubset(G, tuple(data.draw(st.lists(elements, min_size=1, max_size=4))))
    lam = min_displacement(S, A).min_value
    if lam == 0:
        with pytest.raises(PreconditionError):
            short_loxodromic(S, A)
        return
    c = short_loxodromic(S, A)
    assert c.b in set(S.elements) | {G.mul(x, y) for x in S for y in S}
    assert cyclic_length(G, c.b) > 0
    assert c.distance >= lam - 10
    assert c.check(S, A) == []


# -- joint loxodromics ----------------------------------------------------------------


def test_joint_criterion_examples():
    a = F2.parse("a")
    v = joint_loxodromic(a, a, CAY.base, CAY)
    assert v.holds and v.product_loxodromic and v.tau == 2
    assert not joint_loxodromic(a, F2.parse("a^-1"), CAY.base, CAY).holds


def test_joint_criterion_on_modular_branch():
    # base vertex 1 of the subdivision, t^-1 and s as in the product case
    A2 = BS.subdivision()
    o = A2.parse_vertex("1")
    v = joint_loxodromic(M.parse("t^-1"), M.parse("s"), o, A2)
    assert v.holds and v.product_loxodromic


@given(free_elements(F2, 4), free_elements(F2, 4))
def test_joint_criterion_is_sound(g, h):
    v = joint_loxodromic(g, h, CAY.base, CAY)
    if v.holds:
        assert translation_length_value(CAY, F2.mul(g, h)) > 0


# -- free semigroups ------------------------------------------------------------------


def test_pingpong_examples():
    c = pingpong_pair(F2.parse("a"), F2.parse("b a b^-1"), CAY, 6)
    assert c.verified and c.counts == [2 ** n for n in range(1, 7)]
    assert all_words_distinct(F2, c.base, 6)
    assert pingpong_pair(F2.parse("a"), F2.parse("b"), CAY, 4).labels == ["a", "b"]
    m = pingpong_pair(M.parse("s t"), M.parse("t s"), BS, 6)
    assert all_words_distinct(M, m.base, 6)


def test_pingpong_rejects_shared_axes():
    with pytest.raises(PreconditionError):
        pingpong_pair(F2.parse("a"), F2.parse("a^2"), CAY, 3)
    with pytest.raises(PreconditionError):
        pingpong_pair(M.parse("s"), M.parse("s t"), BS, 3)


def test_classification_examples():
    assert classify_action(U(F2, "a", "b"), CAY).kind == "General"
    assert classify_action(U(F2, "a"), CAY).kind == "Lineal"
    assert classify_action(U(F2, "a", "a^-2"), CAY).kind == "Lineal"
    bounded = classify_action(U(M, "s"), BS)
    assert bounded.kind == "Bounded"
    assert classify_action(U(M, "s", "t"), BS).kind == "General"


def test_general_witnesses_are_independent():
    c = classify_action(U(F2, "a", "b"), CAY)
    x, y = c.elements
    assert F2.mul(x, y) != F2.mul(y, x)


def test_free_base_examples():
    c = build_free_base(U(F2, "a", "b", "a^-1", "b^-1"), CAY, 5)
    assert len(c.base) == 4 and c.verified
    assert all_words_distinct(F2, c.base, 4)
    m = build_free_base(U(M, "s", "t", "t^-1"), BS, 5)
    assert m.verified and all_words_distinct(M, m.base, 4)
    with pytest.raises(PreconditionError):
        build_free_base(U(F2, "a", "a^-1"), CAY, 3)


def test_free_base_lies_in_a_bounded_power():
    Uab = U(F2, "a", "b", "a^-1", "b^-1")
    c = build_free_base(Uab, CAY, 3)
    kappa = c.parameters["kappa"]
    # every base element is a product of at most kappa generators
    assert all(len(t) <= kappa for t in c.base)


def test_local_to_global_rejects_backtracking():
    a, b = F2.parse("a"), F2.parse("b")
    assert local_to_global(CAY, CAY.base, [a, b])
    assert not local_to_global(CAY, CAY.base, [a, F2.parse("a^-1")])
