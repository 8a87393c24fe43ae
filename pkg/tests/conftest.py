"""Shared fixtures and brute-force reference implementations.

The reference code here deliberately avoids the package's own arithmetic:
words are reduced with explicit stacks and tree distances come from plain
breadth-first search over neighbours.
"""
from __future__ import annotations

from collections import deque

import pytest
from hypothesis import settings, strategies as st

from treegrowth import CayleyTree, FreeGroup, FreeProduct, MarkedSubset, make_tree

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def F2():
    return FreeGroup(2, ["a", "b"])


@pytest.fixture(scope="session")
def M():
    """The modular group Z/2 * Z/3 with generators s (order 2) and t (order 3)."""
    return FreeProduct([2, 3], ["s", "t"])


@pytest.fixture(scope="session")
def cayley(F2):
    return CayleyTree(F2)


@pytest.fixture(scope="session")
def bass_serre(M):
    return make_tree(M)


# -- reference arithmetic -----------------------------------------------------


def reduce_free(letters):
    """Free reduction of a list of (generator index, +1/-1) pairs."""
    out = []
    for g, e in letters:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return out


def free_word(letters) -> bytes:
    """Encode (generator, sign) pairs in the package's letter codes."""
    return bytes(2 * g + (0 if e == 1 else 1) for g, e in reduce_free(letters))


def reduce_free_product(syllables, orders):
    """Normal form of a list of (factor, exponent) pairs."""
    out = []
    for f, e in syllables:
        e %= orders[f]
        if e == 0:
            continue
        if out and out[-1][0] == f:
            e2 = (out[-1][1] + e) % orders[f]
            out.pop()
            if e2:
                out.append((f, e2))
        else:
            out.append((f, e))
    return out


def bfs_dist(A, u, v, limit=64):
    """Tree distance by breadth-first search over neighbours."""
    if u == v:
        return 0
    seen = {u}
    frontier = deque([(u, 0)])
    while frontier:
        x, d = frontier.popleft()
        if d >= limit:
            break
        for y in A.neighbors(x):
            if y == v:
                return d + 1
            if y not in seen:
                seen.add(y)
                frontier.append((y, d + 1))
    raise AssertionError("vertices not connected within the search limit")


# -- strategies ---------------------------------------------------------------

free_letters = st.lists(st.tuples(st.integers(0, 1), st.sampled_from([1, -1])), max_size=10)
product_syllables = st.lists(st.tuples(st.integers(0, 1), st.integers(1, 5)), max_size=10)


def free_elements(F, max_len=10):
    letters = free_letters if max_len == 10 else st.lists(
        st.tuples(st.integers(0, 1), st.sampled_from([1, -1])), max_size=max_len)
    return letters.map(free_word)


def product_elements(G, max_len=10):
    syllables = product_syllables if max_len == 10 else st.lists(
        st.tuples(st.integers(0, 1), st.integers(1, 5)), max_size=max_len)

    def enc(syls):
        return bytes(G.code(f, e) for f, e in reduce_free_product(syls, G.orders))
    return syllables.map(enc)


def subsets(elements, min_size=1, max_size=5):
    return st.lists(elements, min_size=min_size, max_size=max_size)


def marked(G, elems):
    return MarkedSubset(G, tuple(elems))


# -- acceptance report --------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
