"""Displacement of finite sets of isometries on trees and products of trees.

For a finite set S and a point x, ``lambda(S, x) = max_s d(x, s x)``.  On a
tree each ``v -> d(v, s v)`` is convex along geodesics, hence so is the max,
and steepest descent over vertices reaches the minimum over vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .groups import DirectProduct, Element, GroupError, MarkedSubset, group_ball
from .trees import BassSerreTree, CayleyTree, StarTree, TreeAction, Vertex

# extra additive slack for rounding midpoints of odd segments to vertices
QUASI_CENTER_SLACK = 3


class ProductAction:
    """Coordinatewise action of a direct product on a product of trees (l1 metric)."""

    def __init__(self, group: DirectProduct, factors: Sequence[TreeAction]):
        if not isinstance(group, DirectProduct):
            raise GroupError("ProductAction needs a DirectProduct group")
        if len(factors) != len(group.factors):
            raise GroupError("one tree per direct factor is required")
        for f, t in zip(group.factors, factors):
            if t.group != f:
                raise GroupError("tree group does not match its direct factor")
        self.group = group
        self.factors = list(factors)
        self.base = tuple(t.base for t in factors)

    def act(self, g, x):
        return tuple(t.act(gi, xi) for t, gi, xi in zip(self.factors, g, x))

    def dist(self, x, y):
        return sum(t.dist(a, b) for t, a, b in zip(self.factors, x, y))

    def factor_subset(self, S: MarkedSubset, i: int) -> MarkedSubset:
        return MarkedSubset(self.group.factors[i], [s[i] for s in S])

    def format_vertex(self, x):
        return "(" + ", ".join(t.format_vertex(v) for t, v in zip(self.factors, x)) + ")"

    def spec(self):
        return {"kind": "product", "factors": [t.spec() for t in self.factors]}


@dataclass
class DisplacementReport:
    elements: list[str]
    point: str
    value: int
    factor_values: tuple[int, ...] | None = None
    minimizer: Any = None
    minimizer_label: str | None = None
    min_value: int | None = None
    search: str = "evaluated"

    def record(self) -> dict:
        """Flat key-value form used by the CSV emitter."""
        out = {
            "elements": " ; ".join(self.elements),
            "point": self.point,
            "value": self.value,
            "search": self.search,
        }
        if self.factor_values is not None:
            for i, v in enumerate(self.factor_values):
                out[f"factor_{i + 1}"] = v
        if self.min_value is not None:
            out["min_value"] = self.min_value
            out["minimizer"] = self.minimizer_label
        return out


def displacement(S: MarkedSubset, x, A) -> int:
    return max((A.dist(x, A.act(s, x)) for s in S), default=0)


def displacement_at(S: MarkedSubset, x, A) -> DisplacementReport:
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    value = displacement(S, x, A)
    fv = None
    if isinstance(A, ProductAction):
        fv = tuple(
            max(t.dist(x[i], t.act(s[i], x[i])) for s in S) for i, t in enumerate(A.factors)
        )
    return DisplacementReport(S.words(), A.format_vertex(x), value, fv)


def descend(S: MarkedSubset, A: TreeAction, start: Vertex) -> tuple[Vertex, int, int]:
    """Steepest descent of ``lambda(S, .)`` over vertices; returns (vertex, value, steps).

    Each step moves to the neighbour with the least (value, vertex key); it
    stops when no neighbour is strictly better.  Exact by convexity.
    """
    v, f = start, displacement(S, start, A)
    steps = 0
    while f > 0:
        best = None
        for w in A.neighbors(v):
            cand = (displacement(S, w, A), A.key(w), w)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None or best[0] >= f:
            break
        f, _, v = best
        steps += 1
    return v, f, steps


def min_displacement(S: MarkedSubset, A: TreeAction, start: Vertex | None = None) -> DisplacementReport:
    """Exact ``lambda(S, X)`` over the vertices of A with a minimizing vertex."""
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    o = A.base if start is None else start
    v, f, steps = descend(S, A, o)
    return DisplacementReport(
        S.words(),
        A.format_vertex(o),
        displacement(S, o, A),
        minimizer=v,
        minimizer_label=A.format_vertex(v),
        min_value=f,
        search=f"descent, {steps} steps",
    )


def min_displacement_exhaustive(S: MarkedSubset, A: TreeAction, radius: int | None = None,
                                 center: Vertex | None = None) -> tuple[int, Vertex]:
    """Minimum of ``lambda(S, .)`` over a ball (default radius ``lambda(S, center)``,
    which always contains a minimizer)."""
    c = A.base if center is None else center
    if radius is None:
        radius = displacement(S, c, A)
    best = None
    for v in A.ball(c, radius):
        cand = (displacement(S, v, A), A.key(v), v)
        if best is None or cand[:2] < best[:2]:
            best = cand
    return best[0], best[2]


def factor_minima(S: MarkedSubset, P: ProductAction) -> list[DisplacementReport]:
    return [min_displacement(P.factor_subset(S, i), t) for i, t in enumerate(P.factors)]


# ----------------------------------------------------------------------------
# quasi-centers
# ----------------------------------------------------------------------------


@dataclass
class QuasiCenter:
    z: Vertex
    s: Element
    y: Vertex
    value: int
    bound: int
    reference: int

    @property
    def holds(self) -> bool:
        return self.value <= self.bound


def quasi_center(S: MarkedSubset, o: Vertex, x: Vertex, A: TreeAction) -> QuasiCenter:
    """A point z on some ``[o, s o]`` with ``lambda(S, z) <= 6 lambda(S, x)`` (+3 rounding).

    ``t`` maximizes ``d(o, t o)`` and z is the midpoint of ``[o, t o]`` rounded
    toward o.  The auxiliary point y on ``[o, x]`` at distance
    ``max(|x-o| - |o-z| - L/2, 0)`` from x is recorded too.
    """
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    t = min(S, key=lambda s: (-A.dist(o, A.act(s, o)), S.group.key(s)))
    to = A.act(t, o)
    d = A.dist(o, to)
    z = A.point_on_geodesic(o, to, d // 2)
    L = displacement(S, x, A)
    dx = A.dist(x, o)
    back = max(Fraction(dx) - d // 2 - Fraction(L, 2), 0)
    y = A.point_on_geodesic(x, o, min(dx, int(back)))
    value = displacement(S, z, A)
    return QuasiCenter(z, t, y, value, 6 * L + QUASI_CENTER_SLACK, L)


def min_on_segments(S: MarkedSubset, o: Vertex, A: TreeAction) -> int:
    """Brute-force minimum of ``lambda(S, .)`` over the union of ``[o, s o]``."""
    best = None
    for s in S:
        for v in A.geodesic(o, A.act(s, o)):
            val = displacement(S, v, A)
            if best is None or val < best:
                best = val
    return best


# ----------------------------------------------------------------------------
# orbit density and conjugation reduction
# ----------------------------------------------------------------------------


def orbit_element(A: TreeAction, v: Vertex) -> Element | None:
    """An element g with ``g o = v`` for the base vertex o, or None if v is not in the orbit."""
    G = A.group
    if isinstance(A, CayleyTree):
        return G.mul(v, G.inv(A.base))
    if isinstance(A, (StarTree, BassSerreTree)):
        w0, i0 = A.base
        if v[1] != i0:
            return None
        g = G.mul(v[0], G.inv(w0))
        return g if A.act(g, A.base) == v else None
    raise GroupError(f"orbit lookup not supported for {A.kind} trees")


def nearest_orbit_point(A: TreeAction, z: Vertex) -> tuple[Element, int]:
    """Shortlex-least orbit vertex closest to z, as (g, distance)."""
    seen = {z}
    layer = [z]
    d = 0
    while layer:
        hits = [v for v in layer if orbit_element(A, v) is not None]
        if hits:
            v = min(hits, key=A.key)
            return orbit_element(A, v), d
        nxt = []
        for v in layer:
            for w in A.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        layer = nxt
        d += 1
    raise AssertionError("unreachable")  # pragma: no cover


def density_constant(A: TreeAction, radius: int = 2) -> int:
    """Measured coarse-density constant: max distance from a vertex near o to the orbit of o.

    The ball of radius 2 around o contains a fundamental domain for every
    supported testbed (quotient graphs have diameter at most 2).
    """
    return max(nearest_orbit_point(A, v)[1] for v in A.ball(A.base, radius))


def reduction_constant(l: int, D: int, slack: int = QUASI_CENTER_SLACK) -> tuple[int, list[tuple[int, int]]]:
    """C1 from ``M_{i+1} = max(6M + slack + 2D, 3 M_i + 2D)``, ``M_0 = 0``.

    Writing ``M_i <= a_i M + b_i`` gives ``l M_l <= C1 (M + 1)`` with
    ``C1 = l max(a_l, b_l)``.  Returns C1 and the (a_i, b_i) sequence.
    """
    a, b = 0, 0
    seq = [(a, b)]
    for _ in range(l):
        a, b = max(6, 3 * a), max(slack + 2 * D, 3 * b + 2 * D)
        seq.append((a, b))
    return l * max(a, b), seq


@dataclass
class ReductionStep:
    factor: int
    s: str
    z: str
    g: str
    distance_to_orbit: int
    m_values: tuple[int, ...]
    m_bound: int


@dataclass
class ReductionTrace:
    conjugator: Element
    conjugator_label: str
    M: int
    D: int
    C1: int
    bound: int
    value: int
    steps: list[ReductionStep] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.value <= self.bound


def conjugate_reduce(S: MarkedSubset, P: ProductAction) -> tuple[Element, ReductionTrace]:
    """Find g with ``lambda(g^-1 S g, o) <= C1 (max_i lambda(S, X_i) + 1)``.

    Factor by factor, a quasi-center of the current conjugate is moved to the
    nearest orbit point of the base vertex; the other coordinates of the
    conjugator are trivial, so earlier factors only pick up the 3x growth.
    """
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    G = P.group
    for t in P.factors:
        if not isinstance(t, (CayleyTree, StarTree, BassSerreTree)):
            raise GroupError("conjugate_reduce needs cocompact Cayley or Bass-Serre factors")
    l = len(P.factors)
    D = max(density_constant(t) for t in P.factors)
    C1, seq = reduction_constant(l, D)
    minima = factor_minima(S, P)
    M = max(r.min_value for r in minima)
    g = G.identity
    Si = S
    steps = []
    for i, tree in enumerate(P.factors):
        Fi = P.factor_subset(Si, i)
        x = min_displacement(Fi, tree).minimizer
        qc = quasi_center(Fi, tree.base, x, tree)
        gi_factor, dz = nearest_orbit_point(tree, qc.z)
        gi = G.embed(gi_factor, i)
        g = G.mul(g, gi)
        Si = MarkedSubset(G, [G.mul(G.mul(G.inv(gi), s), gi) for s in Si])
        mvals = tuple(
            displacement(P.factor_subset(Si, j), P.factors[j].base, P.factors[j]) for j in range(i + 1)
        )
        a, b = seq[i + 1]
        steps.append(ReductionStep(
            i + 1, tree.group.format(qc.s), tree.format_vertex(qc.z),
            tree.group.format(gi_factor), dz, mvals, a * M + b,
        ))
    value = displacement(Si, P.base, P)
    trace = ReductionTrace(g, G.format_tuple(g), M, D, C1, C1 * (M + 1), value, steps)
    return g, trace


def orbit_displacement_upper(S: MarkedSubset, P, radius: int = 4, cap: int | None = 200_000) -> tuple[int, Element]:
    """Upper bound for ``lambda(S, G o)``: min of ``lambda(g^-1 S g, o)`` over a word ball."""
    G = S.group
    best = None
    for g in G.sort(group_ball(G, radius, cap)):
        conj = [G.mul(G.mul(G.inv(g), s), g) for s in S]
        val = max(P.dist(P.base, P.act(c, P.base)) for c in conj)
        if best is None or val < best[0]:
            best = (val, g)
    return best


@dataclass
class TransferResult:
    M: int
    factor: int | None
    values: tuple[int, ...]
    minimizers: tuple[str, ...]

    @property
    def succeeded(self) -> bool:
        return self.factor is not None


def factor_transfer(S: MarkedSubset, P: ProductAction, M: int) -> TransferResult:
    """Least factor i (1-based) with ``lambda(S, X_i) > M``; otherwise a report of all values."""
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    reps = factor_minima(S, P)
    values = tuple(r.min_value for r in reps)
    idx = next((i + 1 for i, v in enumerate(values) if v > M), None)
    return TransferResult(M, idx, values, tuple(r.minimizer_label for r in reps))
