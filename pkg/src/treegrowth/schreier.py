"""Generators of finite-index subgroups from a non-symmetric generating set.

A finite-index subgroup H is given through a homomorphism to a permutation
group: either H is the kernel, or the preimage of a point stabilizer.  The
transversal is built from shortest directed U-words, and every generator
produced comes with an explicit U-word witnessing its length bound.

Generation of H is proved exactly for free groups by Stallings folding: all
Schreier generators of H must be readable as loops in the folded graph of W.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import PreconditionError
from .groups import (
    Element,
    FreeGroup,
    FreeProduct,
    Group,
    GroupError,
    MarkedSubset,
    format_cycles,
    parse_cycles,
)
from .growth import GrowthSeries, psg_holds


def _compose(a: tuple, b: tuple) -> tuple:
    # (a b)(x) = a(b(x))
    return tuple(a[x] for x in b)


def _invert(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class FiniteQuotient:
    """Homomorphism from a free group or free product to a permutation group.

    ``images`` maps each generator label to a permutation (0-based tuple or
    cycle notation string with 1-based points).
    """

    def __init__(self, group: Group, degree: int, images: dict):
        if not isinstance(group, (FreeGroup, FreeProduct)):
            raise GroupError("quotients are supported for free groups and free products")
        self.group = group
        self.degree = degree
        self.images = {}
        for lab in group.labels:
            if lab not in images:
                raise GroupError(f"no image given for generator {lab!r}")
            p = images[lab]
            self.images[lab] = parse_cycles(p, degree) if isinstance(p, str) else tuple(p)
            if sorted(self.images[lab]) != list(range(degree)):
                raise GroupError(f"image of {lab!r} is not a permutation of {degree} points")
        extra = set(images) - set(group.labels)
        if extra:
            raise GroupError(f"images given for unknown generators {sorted(extra)}")
        self.identity = tuple(range(degree))
        self._code = {}
        if isinstance(group, FreeGroup):
            for i, lab in enumerate(group.labels):
                self._code[2 * i] = self.images[lab]
                self._code[2 * i + 1] = _invert(self.images[lab])
        else:
            for f, (lab, m) in enumerate(zip(group.labels, group.orders)):
                x = self.images[lab]
                p = self.identity
                for e in range(1, m):
                    p = _compose(p, x)
                    self._code[group.code(f, e)] = p
                if _compose(p, x) != self.identity:
                    raise GroupError(f"image of {lab!r} does not satisfy the relator {lab}^{m}")

    def __call__(self, g: bytes) -> tuple:
        p = self.identity
        for c in g:
            p = _compose(p, self._code[c])
        return p

    def image_elements(self) -> set[tuple]:
        gens = list(self._code.values())
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for p in frontier:
                for x in gens:
                    q = _compose(p, x)
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        return seen

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        frontier = [point]
        gens = list(self._code.values())
        while frontier:
            nxt = []
            for q in frontier:
                for x in gens:
                    if x[q] not in seen:
                        seen.add(x[q])
                        nxt.append(x[q])
            frontier = nxt
        return sorted(seen)

    def restricted(self, points: Sequence[int]) -> "FiniteQuotient":
        """The action on an invariant subset of points, renumbered 0..k-1."""
        idx = {p: i for i, p in enumerate(points)}
        imgs = {lab: tuple(idx[x[p]] for p in points) for lab, x in self.images.items()}
        return FiniteQuotient(self.group, len(points), imgs)

    def spec(self) -> dict:
        return {
            "degree": self.degree,
            "images": {lab: format_cycles(p) for lab, p in self.images.items()},
        }


@dataclass(frozen=True)
class Subgroup:
    """``kind`` is "kernel" or "stabilizer" (preimage of the stabilizer of ``point``)."""

    kind: str = "kernel"
    point: int = 0

    def contains(self, Q: FiniteQuotient, g: bytes) -> bool:
        p = Q(g)
        return p == Q.identity if self.kind == "kernel" else p[self.point] == self.point

    def label(self) -> str:
        return "kernel" if self.kind == "kernel" else f"stabilizer of point {self.point + 1}"


def _left_key(Q: FiniteQuotient, H: Subgroup, g_image: tuple):
    # gH is determined by rho(g) for kernels and by rho(g)(p) for stabilizers
    return g_image if H.kind == "kernel" else g_image[H.point]


@dataclass
class CosetStructure:
    """Left cosets ``a_i H`` with shortest directed U-words for the ``a_i``."""

    U: MarkedSubset
    quotient: FiniteQuotient
    subgroup: Subgroup
    index: int
    transversal: list[Element]
    words: list[tuple[int, ...]]
    keys: list

    def coset_index(self, g: Element) -> int:
        return self.keys.index(_left_key(self.quotient, self.subgroup, self.quotient(g)))

    def phi(self, g: Element) -> Element:
        """The transversal element of the coset gH."""
        return self.transversal[self.coset_index(g)]

    def phi_index(self, g: Element) -> int:
        return self.coset_index(g)


def coset_structure(U: MarkedSubset, Q: FiniteQuotient, H: Subgroup = Subgroup()) -> CosetStructure:
    """Breadth-first search of the directed coset graph.

    The coset ``wH`` of a U-word w is extended by prepending letters
    (``w -> u w``), so the search depth of a coset equals the least length of
    a positive U-word in it.
    """
    if Q.group != U.group:
        raise GroupError("quotient and subset live in different groups")
    G = U.group
    elems = list(U.elements)
    imgs = [Q(u) for u in elems]
    start = _left_key(Q, H, Q.identity)
    seen = {start: 0}
    transversal, words, keys = [G.identity], [()], [start]
    reps = [(Q.identity, G.identity, ())]
    frontier = reps
    while frontier:
        nxt = []
        for img, g, w in frontier:
            for j, u in enumerate(elems):
                im2 = _compose(imgs[j], img)
                k = _left_key(Q, H, im2)
                if k not in seen:
                    seen[k] = len(keys)
                    g2 = G.mul(u, g)
                    w2 = (j,) + w
                    transversal.append(g2)
                    words.append(w2)
                    keys.append(k)
                    nxt.append((im2, g2, w2))
        frontier = nxt
    if H.kind == "kernel":
        total = len(Q.image_elements())
    else:
        total = len(Q.orbit(H.point))
    if len(keys) != total:
        raise PreconditionError(
            f"U does not generate the group as a semigroup at this quotient: "
            f"reached {len(keys)} of {total} cosets"
        )
    return CosetStructure(U, Q, H, len(keys), transversal, words, keys)


@dataclass
class SchreierResult:
    W: list[Element]
    labels: list[str]
    witnesses: list[tuple[int, ...]]
    exponent_bound: int
    size_bound: Fraction
    index: int
    normal: bool
    checks: dict = field(default_factory=dict)

    @property
    def max_length(self) -> int:
        return max(len(w) for w in self.witnesses)

    @property
    def ok(self) -> bool:
        return all(v is True for k, v in self.checks.items() if k in ("contained", "in_subgroup", "size", "generates"))

    def record(self, U: MarkedSubset) -> dict:
        words = U.words()
        return {
            "index": self.index,
            "normal": self.normal,
            "exponent_bound": self.exponent_bound,
            "size_bound": str(self.size_bound),
            "size": len(self.W),
            "longest_witness": self.max_length,
            "generators": [
                {"element": lab, "u_word": " . ".join(words[i] for i in w) or "1"}
                for lab, w in zip(self.labels, self.witnesses)
            ],
            "checks": {k: v for k, v in self.checks.items()},
        }


def _product_of_word(U: MarkedSubset, w: Sequence[int]) -> Element:
    return U.group.product(U.elements[i] for i in w)


def _schreier_normal(U: MarkedSubset, C: CosetStructure) -> tuple[list, list]:
    G = U.group
    d = C.index
    out: dict[Element, tuple[int, ...]] = {}

    def put(x, w):
        old = out.get(x)
        if old is None or (len(w), w) < (len(old), old):
            out[x] = w

    for a, wa in zip(C.transversal, C.words):
        put(G.power(a, d), wa * d)
    for j, u in enumerate(U.elements):
        for a, wa in zip(C.transversal, C.words):
            ua = G.mul(u, a)
            i = C.phi_index(ua)
            p, wp = C.transversal[i], C.words[i]
            put(G.mul(G.power(p, d - 1), ua), wp * (d - 1) + (j,) + wa)
    items = G.sort(out)
    return items, [out[x] for x in items]


def schreier_generators_normal(U: MarkedSubset, C: CosetStructure, verify_depth: int | None = None,
                               cap: int = 50_000) -> SchreierResult:
    """``W = {a^d} u {phi(ua)^(d-1) u a}`` for a normal subgroup of index d.

    W lies in ``U^{<= d^2 - d + 1}`` (checked on explicit U-words), has at
    least ``|U|/d`` elements and generates H (checked exactly for free groups).
    """
    if C.subgroup.kind != "kernel":
        raise PreconditionError("schreier_generators_normal needs the kernel of the quotient")
    d = C.index
    W, words = _schreier_normal(U, C)
    res = SchreierResult(W, [U.group.format(x) for x in W], words, d * d - d + 1,
                         Fraction(len(U), d), d, True)
    _verify(U, C.quotient, C.subgroup, res, verify_depth, cap)
    return res


def schreier_generators(U: MarkedSubset, Q: FiniteQuotient, H: Subgroup = Subgroup(),
                        verify_depth: int | None = None, cap: int = 50_000) -> SchreierResult:
    """Generators of H of index d inside ``U^{<= (d!)^2 - d! + 1}``, at least ``|U|/d!`` of them.

    H acts on its d left cosets through ``rho``; the kernel of that action is
    normal of index ``r <= d!``, so the normal construction gives V for it and
    ``W = V u (T n H)`` with T its transversal.
    """
    G = U.group
    if H.kind == "kernel":
        C = coset_structure(U, Q, H)
        res = schreier_generators_normal(U, C, verify_depth, cap)
        d = C.index
        res.exponent_bound = factorial(d) ** 2 - factorial(d) + 1
        res.size_bound = Fraction(len(U), factorial(d))
        res.normal = False
        res.checks["contained"] = res.max_length <= res.exponent_bound
        res.checks["size"] = len(res.W) >= res.size_bound
        return res
    orbit = Q.orbit(H.point)
    d = len(orbit)
    rho = Q.restricted(orbit)
    K = coset_structure(U, rho, Subgroup("kernel"))
    V, vwords = _schreier_normal(U, K)
    r = K.index
    out = dict(zip(V, vwords))
    for a, wa in zip(K.transversal, K.words):
        if H.contains(Q, a) and a not in out:
            out[a] = wa
    W = G.sort(out)
    res = SchreierResult(W, [G.format(x) for x in W], [out[x] for x in W],
                         factorial(d) ** 2 - factorial(d) + 1, Fraction(len(U), factorial(d)), d, False)
    res.checks["kernel_index"] = r
    _verify(U, Q, H, res, verify_depth, cap)
    return res


# ----------------------------------------------------------------------------
# verification
# ----------------------------------------------------------------------------


class FoldedGraph:
    """Stallings folding of a bouquet of loops, for subgroups of a free group."""

    def __init__(self, words: Sequence[bytes]):
        self.parent = [0]
        self.adj: list[dict[int, int]] = [{}]
        self.pending: deque = deque()
        for w in words:
            self._add_loop(w)
        self._fold()

    def _new(self) -> int:
        self.parent.append(len(self.parent))
        self.adj.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def _edge(self, u: int, x: int, v: int):
        u, v = self.find(u), self.find(v)
        for a, lab, b in ((u, x, v), (v, x ^ 1, u)):
            w = self.adj[a].get(lab)
            if w is None:
                self.adj[a][lab] = b
            elif self.find(w) != b:
                self.pending.append((w, b))

    def _add_loop(self, w: bytes):
        if not w:
            return
        u = 0
        for x in w[:-1]:
            v = self._new()
            self._edge(u, x, v)
            u = v
        self._edge(u, w[-1], 0)

    def _fold(self):
        while self.pending:
            a, b = self.pending.popleft()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if b == self.find(0):
                a, b = b, a
            self.parent[b] = a
            moved, self.adj[b] = self.adj[b], {}
            for x, t in moved.items():
                self._edge(a, x, t)

    def reads(self, w: bytes) -> bool:
        """Whether the reduced word w is in the folded subgroup."""
        v = self.find(0)
        for x in w:
            nxt = self.adj[v].get(x)
            if nxt is None:
                return False
            v = self.find(nxt)
        return v == self.find(0)

    @property
    def size(self) -> int:
        return len({self.find(v) for v in range(len(self.parent))})


def subgroup_schreier_generators(Q: FiniteQuotient, H: Subgroup) -> list[bytes]:
    """Classical Schreier generators of H from a spanning tree of its right coset graph."""
    G = Q.group
    if not isinstance(G, FreeGroup):
        raise GroupError("classical Schreier generators are only used for free groups")

    def key(img):
        return img if H.kind == "kernel" else _invert(img)[H.point]

    letters = G.letters()
    start = key(Q.identity)
    tree = {start: (G.identity, Q.identity)}
    order = [start]
    queue = deque([start])
    while queue:
        k = queue.popleft()
        w, img = tree[k]
        for x in letters:
            img2 = _compose(img, Q(x))
            k2 = key(img2)
            if k2 not in tree:
                tree[k2] = (G.mul(w, x), img2)
                order.append(k2)
                queue.append(k2)
    gens = set()
    for k in order:
        w, img = tree[k]
        for x in letters:
            k2 = key(_compose(img, Q(x)))
            s = G.mul(G.mul(w, x), G.inv(tree[k2][0]))
            if s:
                gens.add(s)
    return G.sort(gens)


def _verify(U: MarkedSubset, Q: FiniteQuotient, H: Subgroup, res: SchreierResult,
            verify_depth: int | None, cap: int):
    G = U.group
    ok_words = all(_product_of_word(U, w) == x for x, w in zip(res.W, res.witnesses))
    res.checks["witness_words"] = ok_words
    res.checks["contained"] = ok_words and res.max_length <= res.exponent_bound
    res.checks["in_subgroup"] = all(H.contains(Q, x) for x in res.W)
    res.checks["size"] = len(res.W) >= res.size_bound
    # bounded tripwire: H n U^{<=L} inside <W>
    target = 2 * res.exponent_bound if verify_depth is None else verify_depth
    L = 0
    ball = {G.identity}
    frontier = {G.identity}
    while L < target:
        nxt = {G.mul(x, u) for x in frontier for u in U.elements}
        if len(ball | nxt) > cap:
            break
        frontier = nxt
        ball |= nxt
        L += 1
    members = [x for x in ball if H.contains(Q, x)]
    res.checks["tripwire_depth"] = L
    res.checks["tripwire_requested"] = target
    res.checks["tripwire_elements"] = len(members)
    if isinstance(G, FreeGroup):
        fg = FoldedGraph(res.W)
        sg = subgroup_schreier_generators(Q, H)
        res.checks["generates"] = all(fg.reads(s) for s in sg)
        res.checks["generation_method"] = "Stallings folding, all Schreier generators of H read as loops"
        res.checks["tripwire"] = all(fg.reads(x) for x in members)
    else:
        reach = _bounded_span(G, res.W, members, radius=max(4, L))
        res.checks["generates"] = reach
        res.checks["generation_method"] = "bounded search in the ball of W and its inverses"
        res.checks["tripwire"] = reach


def _bounded_span(G: Group, W: Sequence[Element], targets: Sequence[Element], radius: int,
                  cap: int = 200_000) -> bool:
    want = set(targets)
    gens = list(set(W) | {G.inv(w) for w in W})
    ball = {G.identity}
    frontier = {G.identity}
    want -= ball
    for _ in range(radius):
        if not want:
            break
        frontier = {G.mul(x, w) for x in frontier for w in gens} - ball
        ball |= frontier
        want -= frontier
        if len(ball) > cap:
            break
    return not want


# ----------------------------------------------------------------------------
# chaining growth bounds through finite index and finite kernels
# ----------------------------------------------------------------------------


@dataclass
class ChainVerdict:
    d: int
    r: int
    alpha: Fraction
    beta: Fraction
    kernel_order: int
    verdicts: list[bool]
    bounds: list[float]

    @property
    def satisfied(self) -> bool:
        return all(self.verdicts)

    @property
    def first_violation(self) -> int | None:
        return next((i + 1 for i, ok in enumerate(self.verdicts) if not ok), None)


def chain_exponent(d: int) -> int:
    return factorial(d) ** 2 - factorial(d) + 1


def chain_psg_bound(series: GrowthSeries, d: int, alpha, beta, kernel_order: int = 1) -> ChainVerdict:
    """Check ``|U^n| >= (a |U| / (d! 2^(r/beta)))^((beta/r) n)`` with ``r = (d!)^2 - d! + 1``.

    ``a = alpha / kernel_order`` rescales a bound known on a quotient with
    finite kernel.  The right side equals ``(a |U| / d!)^(beta n / r) / 2^n``,
    so the comparison is done exactly as
    ``(|U^n| 2^n) >= (a |U| / d!)^(beta n / r)``.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if d < 1 or alpha <= 0 or beta <= 0 or kernel_order < 1:
        raise ValueError("need d >= 1, alpha > 0, beta > 0, kernel_order >= 1")
    a = alpha / kernel_order
    r = chain_exponent(d)
    base = a * series.size / factorial(d)
    verdicts, bounds = [], []
    for n in range(1, series.n_done + 1):
        e = beta * n / r
        verdicts.append(psg_holds(series.count(n) * 2 ** n, base, e))
        bounds.append(float(base) ** float(e) / 2 ** n)
    return ChainVerdict(d, r, alpha, beta, kernel_order, verdicts, bounds)


def quotient_psg_bound(series: GrowthSeries, alpha, beta, kernel_order: int) -> list[bool]:
    """``|W^n| >= (alpha |W| / |ker|)^(beta n)`` for every recorded n."""
    base = Fraction(alpha) / kernel_order * series.size
    beta = Fraction(beta)
    return [psg_holds(series.count(n), base, beta * n) for n in range(1, series.n_done + 1)]
