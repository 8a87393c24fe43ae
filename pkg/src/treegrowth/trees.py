"""Exact isometric actions on simplicial trees.

Three concrete trees are provided:

``CayleyTree``
    Cayley tree of a free group; vertices are reduced words.
``StarTree``
    Bass-Serre tree of a free product of cyclic groups built from the star
    graph of groups (one vertex per coset ``gG_i`` and one per element ``g``).
    For two factors this is the barycentric subdivision of the usual tree.
``BassSerreTree``
    The usual Bass-Serre tree of ``A * B`` (vertices ``gA`` and ``gB`` only,
    edges are the elements).  For three or more factors use ``StarTree``.

``SubdividedTree`` doubles any rooted tree so that edge midpoints become
vertices.  Every tree here has integer distances and, except on subdivided
trees, every element that fixes an edge is trivial.  ``same_endpoint_pair``
relies on that free action on edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable

from .groups import Element, FreeGroup, FreeProduct, Group, GroupError

Vertex = Hashable


class TreeAction:
    """Abstract tree with a left action of ``group`` and a base vertex."""

    group: Group
    kind: str = "tree"
    base: Vertex

    # rooted-tree primitives; subclasses override
    def depth(self, v: Vertex) -> int:
        raise NotImplementedError

    def ancestor(self, v: Vertex, d: int) -> Vertex:
        raise NotImplementedError

    def lca_depth(self, u: Vertex, v: Vertex) -> int:
        raise NotImplementedError

    def act(self, g: Element, v: Vertex) -> Vertex:
        raise NotImplementedError

    def neighbors(self, v: Vertex) -> list[Vertex]:
        raise NotImplementedError

    def key(self, v: Vertex):
        raise NotImplementedError

    def format_vertex(self, v: Vertex) -> str:
        return repr(v)

    def parse_vertex(self, text: str) -> Vertex:
        raise NotImplementedError

    def subdivision(self) -> "TreeAction":
        """Barycentric subdivision (distances doubled)."""
        return SubdividedTree(self)

    def to_subdivision(self, v: Vertex) -> Vertex:
        return (v, 0)

    def from_subdivision(self, p: Vertex) -> Vertex:
        """A vertex of this tree within distance 1/2 of a subdivision point."""
        return p[0]

    # generic metric
    def dist(self, u: Vertex, v: Vertex) -> int:
        return self.depth(u) + self.depth(v) - 2 * self.lca_depth(u, v)

    def point_on_geodesic(self, u: Vertex, v: Vertex, k: int) -> Vertex:
        """The vertex at distance ``k`` from ``u`` on ``[u, v]``."""
        du, l = self.depth(u), self.lca_depth(u, v)
        up = du - l
        if not 0 <= k <= up + self.depth(v) - l:
            raise ValueError("k outside the geodesic")
        if k <= up:
            return self.ancestor(u, du - k)
        return self.ancestor(v, l + (k - up))

    def geodesic(self, u: Vertex, v: Vertex) -> list[Vertex]:
        return [self.point_on_geodesic(u, v, k) for k in range(self.dist(u, v) + 1)]

    def ball(self, center: Vertex, radius: int) -> list[Vertex]:
        seen = {center}
        frontier = [center]
        for _ in range(radius):
            nxt = []
            for v in frontier:
                for w in self.neighbors(v):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return sorted(seen, key=self.key)

    def spec(self) -> dict:
        return {"kind": self.kind, "base": self.format_vertex(self.base)}


class CayleyTree(TreeAction):
    """Cayley tree of a free group acted on by left multiplication."""

    kind = "cayley"

    def __init__(self, group: FreeGroup, base: bytes | str = b""):
        if not isinstance(group, FreeGroup):
            raise GroupError("CayleyTree needs a FreeGroup")
        self.group = group
        self.base = group.parse(base) if isinstance(base, str) else base
        self._letters = group.letters()

    def depth(self, v):
        return len(v)

    def ancestor(self, v, d):
        return v[:d]

    def lca_depth(self, u, v):
        n = min(len(u), len(v))
        i = 0
        while i < n and u[i] == v[i]:
            i += 1
        return i

    def act(self, g, v):
        return self.group.mul(g, v)

    def neighbors(self, v):
        return [self.group.mul(v, x) for x in self._letters]

    def key(self, v):
        return (len(v), v)

    def format_vertex(self, v):
        return self.group.format(v)

    def parse_vertex(self, text):
        return self.group.parse(text)


class StarTree(TreeAction):
    """Tree of the star graph of groups for a free product of cyclic groups.

    Vertices are ``(w, -1)`` for the element ``w`` and ``(w, i)`` for the coset
    ``w G_i`` (``w`` never ends in a syllable of factor ``i``).
    """

    kind = "bass-serre-star"

    def __init__(self, group: FreeProduct, base: Vertex | None = None):
        if not isinstance(group, FreeProduct):
            raise GroupError("Bass-Serre trees need a FreeProduct")
        self.group = group
        self.base = base if base is not None else (b"", 0)
        self._fo = group.factor_of

    def strip(self, w: bytes, i: int) -> bytes:
        return w[:-1] if w and self._fo[w[-1]] == i else w

    def coset(self, g: bytes, i: int) -> Vertex:
        return (self.strip(g, i), i)

    def depth(self, v):
        w, i = v
        return 2 * len(w) + (i >= 0)

    def ancestor(self, v, d):
        if d == self.depth(v):
            return v
        w = v[0]
        if d % 2 == 0:
            return (w[: d // 2], -1)
        k = d // 2
        return (w[:k], self._fo[w[k]])

    def _coset_at(self, v, c):
        w, i = v
        if len(w) > c:
            return self._fo[w[c]]
        if len(w) == c and i >= 0:
            return i
        return None

    def lca_depth(self, u, v):
        a, b = u[0], v[0]
        n = min(len(a), len(b))
        c = 0
        while c < n and a[c] == b[c]:
            c += 1
        fu, fv = self._coset_at(u, c), self._coset_at(v, c)
        if fu is not None and fu == fv:
            return 2 * c + 1
        return 2 * c

    def act(self, g, v):
        w, i = v
        gw = self.group.mul(g, w)
        return (self.strip(gw, i), i) if i >= 0 else (gw, -1)

    def neighbors(self, v):
        w, i = v
        if i < 0:
            return [self.coset(w, j) for j in range(len(self.group.orders))]
        return [(w, -1)] + [(w + x, -1) for x in self.group.factor_elements(i)]

    def key(self, v):
        return (self.depth(v), v[0], v[1])

    def format_vertex(self, v):
        w, i = v
        word = self.group.format(w)
        if i < 0:
            return word
        return f"{word} <{self.group.labels[i]}>" if w else f"<{self.group.labels[i]}>"

    def parse_vertex(self, text):
        text = text.strip()
        if text.endswith(">"):
            head, _, lab = text[:-1].rpartition("<")
            if lab not in self.group.labels:
                raise GroupError(f"unknown factor label {lab!r}")
            return self.coset(self.group.parse(head), self.group.labels.index(lab))
        return (self.group.parse(text), -1)


class BassSerreTree(TreeAction):
    """Bass-Serre tree of ``A * B`` with A, B finite cyclic.

    Vertices are the cosets ``wA`` / ``wB`` encoded as in ``StarTree``;
    the star tree is exactly its barycentric subdivision.
    """

    kind = "bass-serre"

    def __init__(self, group: FreeProduct, base: Vertex | None = None):
        if not isinstance(group, FreeProduct) or len(group.orders) != 2:
            raise GroupError("BassSerreTree needs a free product of exactly two cyclic groups")
        self.group = group
        self.star = StarTree(group)
        self.base = base if base is not None else (b"", 0)
        if self.base[1] < 0:
            raise GroupError("base of a Bass-Serre tree must be a coset vertex")

    def depth(self, v):
        # depth in the star tree is odd; this is only used through dist/lca
        return (self.star.depth(v) + 1) // 2

    def dist(self, u, v):
        return self.star.dist(u, v) // 2

    def lca_depth(self, u, v):
        raise NotImplementedError("not a rooted tree; use dist/point_on_geodesic")

    def point_on_geodesic(self, u, v, k):
        if not 0 <= k <= self.dist(u, v):
            raise ValueError("k outside the geodesic")
        return self.star.point_on_geodesic(u, v, 2 * k)

    def act(self, g, v):
        return self.star.act(g, v)

    def neighbors(self, v):
        out = []
        for e in self.star.neighbors(v):
            for c in self.star.neighbors(e):
                if c != v:
                    out.append(c)
        return out

    def key(self, v):
        return self.star.key(v)

    def format_vertex(self, v):
        return self.star.format_vertex(v)

    def parse_vertex(self, text):
        v = self.star.parse_vertex(text)
        if v[1] < 0:
            raise GroupError("Bass-Serre tree vertices are cosets, write e.g. 's t <s>'")
        return v

    def subdivision(self):
        return StarTree(self.group, self.base)

    def to_subdivision(self, v):
        return v

    def from_subdivision(self, p):
        if p[1] >= 0:
            return p
        return min(self.star.neighbors(p), key=self.key)


class SubdividedTree(TreeAction):
    """Barycentric subdivision of a rooted tree.

    Points are ``(v, 0)`` for an original vertex and ``(v, 1)`` for the midpoint
    of the edge from ``v``'s parent to ``v``.  Distances are doubled.
    """

    def __init__(self, tree: TreeAction):
        self.tree = tree
        self.group = tree.group
        self.kind = tree.kind + "-subdivided"
        self.base = tree.to_subdivision(tree.base)

    def depth(self, p):
        v, h = p
        return 2 * self.tree.depth(v) - h

    def ancestor(self, p, d):
        if d == self.depth(p):
            return p
        v = p[0]
        if d % 2 == 0:
            return (self.tree.ancestor(v, d // 2), 0)
        return (self.tree.ancestor(v, (d + 1) // 2), 1)

    def lca_depth(self, p, q):
        return min(2 * self.tree.lca_depth(p[0], q[0]), self.depth(p), self.depth(q))

    def _parent(self, v):
        return self.tree.ancestor(v, self.tree.depth(v) - 1)

    def act(self, g, p):
        v, h = p
        if not h:
            return (self.tree.act(g, v), 0)
        a, b = self.tree.act(g, self._parent(v)), self.tree.act(g, v)
        return (b, 1) if self.tree.depth(b) > self.tree.depth(a) else (a, 1)

    def neighbors(self, p):
        v, h = p
        if h:
            return [(v, 0), (self._parent(v), 0)]
        d = self.tree.depth(v)
        out = [(c, 1) for c in self.tree.neighbors(v) if self.tree.depth(c) > d]
        if d > 0:
            out.append((v, 1))
        return out

    def key(self, p):
        return (self.depth(p), self.tree.key(p[0]), p[1])

    def format_vertex(self, p):
        v, h = p
        s = self.tree.format_vertex(v)
        return f"mid({self.tree.format_vertex(self._parent(v))} | {s})" if h else s

    def to_subdivision(self, v):
        raise NotImplementedError


def make_tree(group: Group, kind: str | None = None, base: Any = None) -> TreeAction:
    """Build the natural tree for ``group``: Cayley tree for free groups,
    Bass-Serre tree for free products (star tree for three or more factors)."""
    if isinstance(group, FreeGroup):
        if kind not in (None, "cayley"):
            raise GroupError(f"tree kind {kind!r} is not available for free groups")
        t = CayleyTree(group)
    elif isinstance(group, FreeProduct):
        if kind in (None, "bass-serre") and len(group.orders) == 2:
            t = BassSerreTree(group)
        elif kind in (None, "bass-serre", "bass-serre-star"):
            t = StarTree(group)
        else:
            raise GroupError(f"tree kind {kind!r} is not available for free products")
    else:
        raise GroupError(f"no tree action for {group!r}")
    if base is not None:
        t.base = t.parse_vertex(base) if isinstance(base, str) else base
    return t


# ----------------------------------------------------------------------------
# metric quantities
# ----------------------------------------------------------------------------


def dist(A: TreeAction, u: Vertex, v: Vertex) -> int:
    return A.dist(u, v)


def gromov_product(A: TreeAction, a: Vertex, c: Vertex, b: Vertex) -> Fraction:
    """<a, c>_b = (|a-b| + |c-b| - |a-c|) / 2; on a tree this is dist(b, [a, c])."""
    return Fraction(A.dist(a, b) + A.dist(c, b) - A.dist(a, c), 2)


def translation_length_value(A: TreeAction, g: Element, o: Vertex | None = None) -> int:
    """tau(g) = max(0, |o - g^2 o| - |o - g o|), valid at any vertex o of a tree."""
    o = A.base if o is None else o
    go = A.act(g, o)
    return max(0, A.dist(o, A.act(g, go)) - A.dist(o, go))


def _cyclic_core(G: Group, w: bytes) -> tuple[bytes, bytes]:
    """w = u c u^-1 with c cyclically reduced (free groups and free products)."""
    u = G.identity
    while len(w) >= 2 and len(G.mul(w[-1:], w[:1])) < 2:
        x = w[:1]
        w = G.mul(G.mul(G.inv(x), w), x)
        u = G.mul(u, x)
    return u, w


def _primitive_root(w: bytes) -> bytes:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@dataclass(frozen=True)
class AxisFingerprint:
    """Identifies the axis of a loxodromic element.

    ``core`` is the primitive cyclically reduced word in its shortlex-least
    rotation over both orientations, ``sign`` records whether that rotation
    came from the element (+1) or its inverse (-1), and ``anchor`` is the
    projection of the base vertex to the axis.
    """

    core: str
    sign: int
    anchor: str
    translation: int


@dataclass(frozen=True)
class Translation:
    tau: int
    loxodromic: bool
    fingerprint: AxisFingerprint | None = None
    fixed_vertex: Vertex | None = None
    inverted_edge: tuple | None = None

    @property
    def kind(self) -> str:
        return "loxodromic" if self.loxodromic else "elliptic"


def axis_projection(A: TreeAction, g: Element, x: Vertex) -> Vertex:
    """Closest point of the axis of loxodromic ``g`` to ``x``."""
    gx = A.act(g, x)
    d = A.dist(x, gx)
    tau = max(0, A.dist(x, A.act(g, gx)) - d)
    if tau == 0:
        raise ValueError("element is not loxodromic")
    return A.point_on_geodesic(x, gx, (d - tau) // 2)


def on_axis(A: TreeAction, g: Element, v: Vertex, tau: int | None = None) -> bool:
    if tau is None:
        tau = translation_length_value(A, g, v)
    return tau > 0 and A.dist(v, A.act(g, v)) == tau


def fingerprint(A: TreeAction, g: Element) -> AxisFingerprint:
    G = A.group
    tau = translation_length_value(A, g)
    if tau == 0:
        raise ValueError("element is not loxodromic")
    anchor = axis_projection(A, g, A.base)
    if isinstance(g, bytes):
        _, c = _cyclic_core(G, g)
        r = _primitive_root(c)
        best = None
        for sign, word in ((1, r), (-1, G.inv(r))):
            for i in range(len(word)):
                rot = word[i:] + word[:i]
                cand = ((len(rot), rot), sign)
                if best is None or cand[0] < best[0]:
                    best = cand
        core = G.format(best[0][1])
        sign = best[1]
    else:
        core, sign = G.format(g), 1
    return AxisFingerprint(core=core, sign=sign, anchor=A.format_vertex(anchor), translation=tau)


def translation_length(g: Element, A: TreeAction) -> Translation:
    """Exact translation length with elliptic/loxodromic classification.

    On a tree the stable and minimal translation lengths coincide.
    """
    o = A.base
    tau = translation_length_value(A, g, o)
    if tau > 0:
        return Translation(tau, True, fingerprint=fingerprint(A, g))
    go = A.act(g, o)
    d = A.dist(o, go)
    if d % 2 == 0:
        m = A.point_on_geodesic(o, go, d // 2)
        if A.act(g, m) == m:
            return Translation(0, False, fixed_vertex=m)
        raise AssertionError("elliptic element without a fixed midpoint")  # pragma: no cover
    a = A.point_on_geodesic(o, go, d // 2)
    b = A.point_on_geodesic(o, go, d // 2 + 1)
    return Translation(0, False, inverted_edge=(a, b))


def loxodromic_criterion(g: Element, o: Vertex, A: TreeAction) -> bool:
    """Whether ``|o - go| > 2 <o, g^2 o>_{go}``.

    This is the tree (delta = 0) form of the classical criterion; the
    inequality must be strict, since an elliptic element fixing ``o`` gives
    equality.  Strict inequality holds exactly for loxodromic ``g``.
    """
    go = A.act(g, o)
    g2o = A.act(g, go)
    return A.dist(o, go) > 2 * gromov_product(A, o, g2o, go)


def axes_equal(A: TreeAction, g: Element, h: Element) -> bool:
    """Whether loxodromic ``g`` and ``h`` have the same axis (same endpoint pair).

    If the axes share a segment of length > tau(g) + tau(h), the commutator of
    g and h (or of g and h^-1) fixes an edge, hence is trivial on these trees,
    so g and h commute and share their axis.
    """
    tg = translation_length_value(A, g)
    th = translation_length_value(A, h)
    if tg == 0 or th == 0:
        raise ValueError("axes are only defined for loxodromic elements")
    v = axis_projection(A, g, A.base)
    k = -(-(tg + th + 1) // (2 * tg))
    G = A.group
    u1 = A.act(G.power(g, -k), v)
    u2 = A.act(G.power(g, k), v)
    return on_axis(A, h, u1, th) and on_axis(A, h, u2, th)


def same_endpoint_pair(g: Element, h: Element, A: TreeAction) -> bool:
    """Whether ``h`` preserves the endpoint pair of the axis of ``g`` (h in E(g))."""
    G = A.group
    if translation_length_value(A, g) == 0:
        raise ValueError("g must be loxodromic")
    return axes_equal(A, g, G.conj(h, g))


def independent(g: Element, h: Element, A: TreeAction) -> bool:
    """Loxodromics with disjoint endpoint pairs.

    With free edge actions two distinct axes cannot share a ray, so this is
    the negation of axis equality.
    """
    return not axes_equal(A, g, h)
