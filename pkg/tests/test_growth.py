import csv
import io
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from treegrowth.groups import DirectProduct, FreeGroup, FreeProduct, MarkedSubset
from treegrowth.growth import (
    CSV_COLUMNS,
    GrowthSeries,
    commutator_set,
    free_rank_verify,
    growth_rate,
    naive_commutator_sizes,
    naive_product_set_counts,
    product_set_counts,
    psg_check,
    psg_holds,
    read_growth_csv,
    write_growth_csv,
)
from treegrowth.loxodromic import build_free_base
from treegrowth.trees import CayleyTree

from conftest import free_elements, product_elements

F2 = FreeGroup(2, ["a", "b"])
M = FreeProduct([2, 3], ["s", "t"])
SYM = MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"])


def U(G, *words):
    return MarkedSubset.from_words(G, list(words))


# -- counts -------------------------------------------------------------------------


def test_positive_generators_count_powers_of_two():
    s = product_set_counts(U(F2, "a", "b"), 12)
    assert s.counts == [2 ** n for n in range(1, 13)]
    assert s.cumulative == [2 ** (n + 1) - 1 for n in range(1, 13)]


def test_symmetric_generators():
    s = product_set_counts(SYM, 8)
    assert s.count(2) == 13
    assert s.cumulative == [2 * 3 ** n - 1 for n in range(1, 9)]
    # U^n: reduced words of length <= n with the parity of n
    for n in range(1, 9):
        want = sum(1 if k == 0 else 4 * 3 ** (k - 1) for k in range(n % 2, n + 1, 2))
        assert s.count(n) == want


def test_involution_alternates_single_elements():
    s = product_set_counts(U(M, "s"), 6)
    assert s.counts == [1] * 6 and s.cumulative == [2] * 6


@given(st.lists(free_elements(F2, 3), min_size=1, max_size=3), st.integers(1, 4))
def test_counts_match_naive_enumeration(elems, n):
    S = MarkedSubset(F2, tuple(elems))
    assert product_set_counts(S, n).counts == naive_product_set_counts(S, n).counts


@given(st.lists(product_elements(M, 3), min_size=1, max_size=3), st.integers(1, 4))
def test_free_product_counts_match_naive_enumeration(elems, n):
    S = MarkedSubset(M, tuple(elems))
    s = product_set_counts(S, n)
    assert s.counts == naive_product_set_counts(S, n).counts
    assert s.check_invariants() == []


@given(st.lists(free_elements(F2, 3), min_size=1, max_size=3))
def test_invariants_hold_when_identity_is_included(elems):
    S = MarkedSubset(F2, tuple(elems) + (F2.identity,))
    assert product_set_counts(S, 5).check_invariants() == []


def test_cap_truncates_the_series():
    s = product_set_counts(SYM, 10, cap=200)
    assert s.truncated and s.n_done < 10
    assert s.counts == product_set_counts(SYM, s.n_done).counts


def test_thread_count_does_not_change_the_result():
    one = product_set_counts(SYM, 8)
    two = product_set_counts(SYM, 8, threads=2)
    assert one.counts == two.counts and one.cumulative == two.cumulative


def test_direct_product_counts():
    D = DirectProduct([F2, FreeGroup(1, ["c"])])
    s = product_set_counts(MarkedSubset.from_words(D, ["a", "c"]), 5)
    assert s.counts == naive_product_set_counts(MarkedSubset.from_words(D, ["a", "c"]), 5).counts


# -- inequalities --------------------------------------------------------------------------


def test_psg_examples():
    s = GrowthSeries(2, [2 ** n for n in range(1, 7)], [2 ** (n + 1) - 1 for n in range(1, 7)], 6)
    assert psg_check(s, 1, 1).satisfied
    t = GrowthSeries(2, [1] * 4, [2] * 4, 4)
    assert psg_check(t, 1, 1).first_violation == 1


@given(st.integers(1, 10 ** 6), st.fractions(Fraction(1, 10), 20), st.fractions(0, 4))
def test_exact_power_comparison(count, base, exponent):
    base = Fraction(base).limit_denominator(30)
    exponent = Fraction(exponent).limit_denominator(6)
    if base <= 0:
        return
    q = exponent.denominator
    want = Fraction(count) ** q >= base ** exponent.numerator
    assert psg_holds(count, base, exponent) == want


def test_symmetric_series_against_quarter_half():
    s = product_set_counts(SYM, 8)
    fit = psg_check(s, Fraction(1, 4), Fraction(1, 2))
    # (alpha |U|)^(beta n) = 1, so every n holds
    assert fit.satisfied


def test_growth_rate_examples():
    r = growth_rate(product_set_counts(U(F2, "a", "b"), 10))
    assert all(x > 2 for x in r.roots) and r.roots == sorted(r.roots, reverse=True)
    assert growth_rate(product_set_counts(U(M, "s"), 4)).roots[-1] == pytest.approx(2 ** 0.25)
    sym = growth_rate(product_set_counts(SYM, 10))
    assert all(x > 3 for x in sym.roots) and sym.envelope == sorted(sym.envelope, reverse=True)


# -- free bases ---------------------------------------------------------------------------------


def test_free_rank_examples():
    assert free_rank_verify(F2, [F2.parse("a"), F2.parse("b")], 10).verified
    res = free_rank_verify(F2, [F2.parse("a"), F2.parse("a^2")], 2)
    assert not res.verified
    # the first collision found is a^2 = a a, already at length 2
    assert res.collision_words(["a", "a^2"]) == ("a^2", "a a")
    T = build_free_base(SYM, CayleyTree(F2), 3).base
    assert free_rank_verify(F2, T, 6).verified


@given(st.lists(free_elements(F2, 3), min_size=1, max_size=3, unique=True), st.integers(1, 4))
def test_free_rank_against_brute_force(T, depth):
    seen, distinct = set(), True
    for n in range(depth + 1):
        for w in product(T, repeat=n):
            x = F2.product(w)
            if x in seen:
                distinct = False
            seen.add(x)
    assert free_rank_verify(F2, T, depth).verified == distinct


# -- commutators -------------------------------------------------------------------------------


def test_commutators_match_naive_enumeration():
    c = commutator_set(SYM, 4)
    assert c.sizes == naive_commutator_sizes(SYM, 4)
    assert F2.commutator(F2.parse("a"), F2.parse("b")) in c.witnesses


def test_commutators_grow_at_least_linearly():
    c = commutator_set(SYM, 6)
    assert c.sizes == sorted(c.sizes)
    assert all(c.meets(Fraction(1, 2)))


def test_abelian_subgroup_has_trivial_commutators():
    F1 = FreeGroup(1, ["x"])
    c = commutator_set(U(F1, "x"), 5)
    assert c.sizes == [1] * 5


def test_commutator_witnesses_are_correct():
    c = commutator_set(U(F2, "a", "b"), 3)
    for x, (k, g, h) in c.witnesses.items():
        assert F2.commutator(g, h) == x
        assert len(g) <= k and len(h) <= k


# -- csv -------------------------------------------------------------------------------------------


def test_csv_layout():
    s = product_set_counts(U(F2, "a", "b"), 3)
    text = write_growth_csv(s, psg_check(s, 1, 1))
    assert text.endswith("\r\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1] == ["1", "2", "3", "2", "holds"]
    assert [r["count_exact"] for r in read_growth_csv(text)] == ["2", "4", "8"]


def test_csv_extra_columns_and_truncation_marker():
    s = product_set_counts(SYM, 10, cap=200)
    text = write_growth_csv(s, extra={"chained": ["x"] * s.n_done})
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][-1] == "chained"
    assert rows[-1][4] == "truncated"


def test_csv_file_output(tmp_path):
    s = product_set_counts(U(F2, "a"), 2)
    path = tmp_path / "g.csv"
    text = write_growth_csv(s, out=path)
    assert path.read_bytes() == text.encode()
