"""Exact normal forms for free groups, free products of finite cyclic groups,
their direct products, and finite permutation groups.

Elements are plain immutable values so they hash and compare cheaply:

* free groups and free products use ``bytes`` (one byte per letter or
  syllable), already freely reduced / syllable-reduced;
* direct products use a ``tuple`` of factor elements;
* permutation groups use a ``tuple`` of 0-based images.

Equality of elements is equality of these values.  All tie-breaking in the
package goes through :meth:`Group.key`, a shortlex key.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, Union

Element = Union[bytes, tuple]

_DEFAULT_LABELS = "abcdefghijklmnopqrstuvwxyz"
_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


class GroupError(ValueError):
    """Structural misuse: mismatched groups, unknown labels, bad specs."""


class BallLimitError(RuntimeError):
    """A word-ball enumeration exceeded its cardinality cap."""

    def __init__(self, message: str, partial: set | None = None, radius: int | None = None):
        super().__init__(message)
        self.partial = partial
        self.radius = radius


def _tokens(word: str) -> list[tuple[str, int]]:
    word = word.strip()
    if word in ("", "1", "e", "id"):
        return []
    out = []
    for tok in word.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise GroupError(f"malformed token {tok!r} in word {word!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
    return out


class Group:
    """Common interface.  Subclasses implement ``mul``, ``inv``, ``identity``,
    ``generators``, ``parse``, ``format``, ``key`` and ``spec``."""

    labels: tuple[str, ...]
    identity: Element

    def mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def inv(self, a: Element) -> Element:
        raise NotImplementedError

    def key(self, a: Element):
        raise NotImplementedError

    def parse(self, word: str) -> Element:
        raise NotImplementedError

    def format(self, a: Element) -> str:
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError

    def generators(self) -> list[Element]:
        return [self.parse(lab) for lab in self.labels]

    def length(self, a: Element) -> int:
        return 0

    def is_identity(self, a: Element) -> bool:
        return a == self.identity

    def product(self, elements: Iterable[Element]) -> Element:
        out = self.identity
        for e in elements:
            out = self.mul(out, e)
        return out

    def power(self, a: Element, n: int) -> Element:
        if n < 0:
            a, n = self.inv(a), -n
        out, base = self.identity, a
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def conj(self, g: Element, x: Element) -> Element:
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def commutator(self, g: Element, h: Element) -> Element:
        """[g, h] = g h g^-1 h^-1, computed as (gh)(hg)^-1."""
        return self.mul(self.mul(g, h), self.inv(self.mul(h, g)))

    def sort(self, elements: Iterable[Element]) -> list[Element]:
        return sorted(elements, key=self.key)

    def __eq__(self, other):
        return type(self) is type(other) and self.spec() == other.spec()

    def __hash__(self):
        return hash(repr(self.spec()))


class FreeGroup(Group):
    """Free group of finite rank; letter ``x_i`` is byte ``2i`` and its inverse ``2i+1``."""

    def __init__(self, rank: int, labels: Sequence[str] | None = None):
        if rank < 1:
            raise GroupError("free group rank must be >= 1")
        if rank > 127:
            raise GroupError("free group rank must be <= 127")
        self.rank = rank
        self.labels = tuple(labels) if labels is not None else tuple(_DEFAULT_LABELS[:rank])
        if len(self.labels) != rank or len(set(self.labels)) != rank:
            raise GroupError(f"need {rank} distinct labels, got {self.labels}")
        self.identity = b""
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._flip = bytes((c ^ 1) if c < 2 * rank else c for c in range(256))

    def mul(self, a: bytes, b: bytes) -> bytes:
        if not a:
            return b
        if not b:
            return a
        n = min(len(a), len(b))
        i = 0
        while i < n and a[-1 - i] ^ 1 == b[i]:
            i += 1
        if i == 0:
            return a + b
        return a[: len(a) - i] + b[i:]

    def inv(self, a: bytes) -> bytes:
        return a[::-1].translate(self._flip)

    def letters(self) -> list[bytes]:
        """All 2k letters, generators first: a, a^-1, b, b^-1, ..."""
        return [bytes([c]) for c in range(2 * self.rank)]

    def key(self, a: bytes):
        return (len(a), a)

    def length(self, a: bytes) -> int:
        return len(a)

    def parse(self, word: str) -> bytes:
        out = bytearray()
        for lab, e in _tokens(word):
            if lab not in self._index:
                raise GroupError(f"unknown generator {lab!r}")
            code = 2 * self._index[lab] + (e < 0)
            for _ in range(abs(e)):
                if out and out[-1] == code ^ 1:
                    out.pop()
                else:
                    out.append(code)
        return bytes(out)

    def format(self, a: bytes) -> str:
        if not a:
            return "1"
        parts = []
        i = 0
        while i < len(a):
            j = i
            while j < len(a) and a[j] == a[i]:
                j += 1
            run = j - i
            lab = self.labels[a[i] >> 1]
            e = -run if a[i] & 1 else run
            parts.append(lab if e == 1 else f"{lab}^{e}")
            i = j
        return " ".join(parts)

    def cyclic_reduction(self, a: bytes) -> tuple[bytes, bytes]:
        """Return ``(u, c)`` with ``a = u c u^-1`` and ``c`` cyclically reduced."""
        i, j = 0, len(a)
        while j - i >= 2 and a[i] ^ 1 == a[j - 1]:
            i += 1
            j -= 1
        return a[:i], a[i:j]

    def spec(self) -> dict:
        return {"kind": "free", "rank": self.rank, "labels": list(self.labels)}

    def __repr__(self):
        return f"FreeGroup({self.rank}, labels={list(self.labels)})"


class FreeProduct(Group):
    """Free product of finite cyclic groups Z/m_1 * ... * Z/m_k.

    A syllable ``x_i^e`` (``1 <= e < m_i``) is one byte; exponents are stored as
    least positive residues and adjacent syllables always come from different
    factors, which makes the byte string a unique normal form.
    """

    def __init__(self, orders: Sequence[int], labels: Sequence[str] | None = None):
        orders = tuple(int(m) for m in orders)
        if not orders:
            raise GroupError("free product needs at least one factor")
        if any(m < 2 for m in orders):
            raise GroupError(f"cyclic orders must be >= 2, got {orders}")
        if sum(m - 1 for m in orders) > 256:
            raise GroupError("too many syllables for the byte encoding")
        self.orders = orders
        k = len(orders)
        if labels is None:
            labels = tuple("stuvwxyz"[:k]) if k <= 8 else tuple(f"x{i}" for i in range(k))
        self.labels = tuple(labels)
        if len(self.labels) != k or len(set(self.labels)) != k:
            raise GroupError(f"need {k} distinct labels, got {self.labels}")
        self.identity = b""
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._offset = []
        self.factor_of: list[int] = []
        self.exp_of: list[int] = []
        off = 0
        for i, m in enumerate(orders):
            self._offset.append(off)
            for e in range(1, m):
                self.factor_of.append(i)
                self.exp_of.append(e)
            off += m - 1
        table = list(range(256))
        for c in range(off):
            f, e = self.factor_of[c], self.exp_of[c]
            table[c] = self.code(f, orders[f] - e)
        self._inv_table = bytes(table)

    def code(self, factor: int, exponent: int) -> int:
        return self._offset[factor] + exponent - 1

    def mul(self, a: bytes, b: bytes) -> bytes:
        if not a:
            return b
        if not b:
            return a
        fo, eo, orders = self.factor_of, self.exp_of, self.orders
        i, j = len(a), 0
        while i > 0 and j < len(b):
            ca, cb = a[i - 1], b[j]
            f = fo[ca]
            if f != fo[cb]:
                break
            e = (eo[ca] + eo[cb]) % orders[f]
            if e:
                return a[: i - 1] + bytes([self._offset[f] + e - 1]) + b[j + 1 :]
            i -= 1
            j += 1
        return a[:i] + b[j:]

    def inv(self, a: bytes) -> bytes:
        return a[::-1].translate(self._inv_table)

    def key(self, a: bytes):
        return (len(a), a)

    def length(self, a: bytes) -> int:
        return len(a)

    def factor_elements(self, factor: int) -> list[bytes]:
        """Non-identity elements of the ``factor``-th cyclic group."""
        return [bytes([self.code(factor, e)]) for e in range(1, self.orders[factor])]

    def parse(self, word: str) -> bytes:
        out = self.identity
        for lab, e in _tokens(word):
            if lab not in self._index:
                raise GroupError(f"unknown generator {lab!r}")
            f = self._index[lab]
            r = e % self.orders[f]
            if r:
                out = self.mul(out, bytes([self.code(f, r)]))
        return out

    def format(self, a: bytes) -> str:
        if not a:
            return "1"
        parts = []
        for c in a:
            lab, e = self.labels[self.factor_of[c]], self.exp_of[c]
            parts.append(lab if e == 1 else f"{lab}^{e}")
        return " ".join(parts)

    def spec(self) -> dict:
        return {"kind": "free_product", "orders": list(self.orders), "labels": list(self.labels)}

    def __repr__(self):
        return f"FreeProduct({list(self.orders)}, labels={list(self.labels)})"


class DirectProduct(Group):
    """Direct product; elements are tuples, the alphabet is the union of the
    factor alphabets (labels must be pairwise distinct across factors)."""

    def __init__(self, factors: Sequence[Group]):
        if not factors:
            raise GroupError("direct product needs at least one factor")
        self.factors = tuple(factors)
        self.labels = tuple(lab for f in self.factors for lab in f.labels)
        if len(set(self.labels)) != len(self.labels):
            raise GroupError(f"factor labels must be pairwise distinct: {self.labels}")
        self.identity = tuple(f.identity for f in self.factors)
        self._owner = {lab: i for i, f in enumerate(self.factors) for lab in f.labels}

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a: tuple) -> tuple:
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def key(self, a: tuple):
        return (self.length(a), tuple(f.key(x) for f, x in zip(self.factors, a)))

    def length(self, a: tuple) -> int:
        return sum(f.length(x) for f, x in zip(self.factors, a))

    def pack(self, *parts) -> tuple:
        """Build an element from factor elements or factor words."""
        if len(parts) != len(self.factors):
            raise GroupError(f"expected {len(self.factors)} coordinates")
        return tuple(f.parse(p) if isinstance(p, str) else p for f, p in zip(self.factors, parts))

    def project(self, a: tuple, i: int) -> Element:
        return a[i]

    def embed(self, x: Element, i: int) -> tuple:
        out = list(self.identity)
        out[i] = x
        return tuple(out)

    def parse(self, word: str) -> tuple:
        out = list(self.identity)
        for lab, e in _tokens(word):
            if lab not in self._owner:
                raise GroupError(f"unknown generator {lab!r}")
            i = self._owner[lab]
            f = self.factors[i]
            out[i] = f.mul(out[i], f.parse(f"{lab}^{e}"))
        return tuple(out)

    def format(self, a: tuple) -> str:
        parts = [f.format(x) for f, x in zip(self.factors, a) if x != f.identity]
        return " ".join(parts) if parts else "1"

    def format_tuple(self, a: tuple) -> str:
        return "(" + ", ".join(f.format(x) for f, x in zip(self.factors, a)) + ")"

    def spec(self) -> dict:
        return {"kind": "direct_product", "factors": [f.spec() for f in self.factors]}

    def __repr__(self):
        return f"DirectProduct({list(self.factors)})"


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse 1-based cycle notation such as ``"(1 2 3)(4 5)"`` or ``"()"``."""
    perm = list(range(degree))
    text = text.strip()
    if text in ("", "()", "id", "1"):
        return tuple(perm)
    cycles = re.findall(r"\(([^()]*)\)", text)
    if re.sub(r"\(([^()]*)\)", "", text).strip():
        raise GroupError(f"malformed cycle notation {text!r}")
    seen = set()
    for cyc in cycles:
        pts = [int(p) - 1 for p in cyc.replace(",", " ").split()]
        for p in pts:
            if not 0 <= p < degree:
                raise GroupError(f"point {p + 1} outside degree {degree}")
            if p in seen:
                raise GroupError(f"point {p + 1} repeated in {text!r}")
            seen.add(p)
        for x, y in zip(pts, pts[1:] + pts[:1]):
            perm[x] = y
    return tuple(perm)


def format_cycles(perm: Sequence[int]) -> str:
    seen, out = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(x + 1))
            x = perm[x]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"


class PermutationGroup(Group):
    """Subgroup of Sym(degree) given by labeled generator permutations.

    ``mul(a, b)`` is composition of functions, ``(a*b)(x) = a(b(x))``, so a
    word acts on points right-to-left.
    """

    def __init__(self, degree: int, generators: dict[str, Sequence[int]]):
        if degree < 1:
            raise GroupError("degree must be >= 1")
        self.degree = degree
        self.labels = tuple(generators)
        self._gens = {}
        for lab, p in generators.items():
            p = tuple(p)
            if sorted(p) != list(range(degree)):
                raise GroupError(f"generator {lab!r} is not a permutation of degree {degree}")
            self._gens[lab] = p
        self.identity = tuple(range(degree))

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(a[x] for x in b)

    def inv(self, a: tuple) -> tuple:
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def key(self, a: tuple):
        return a

    def parse(self, word: str) -> tuple:
        out = self.identity
        for lab, e in _tokens(word):
            if lab not in self._gens:
                raise GroupError(f"unknown generator {lab!r}")
            out = self.mul(out, self.power(self._gens[lab], e))
        return out

    def format(self, a: tuple) -> str:
        return format_cycles(a)

    def order(self) -> int:
        return len(self.elements())

    def elements(self) -> set[tuple]:
        gens = list(self._gens.values())
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(g, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def spec(self) -> dict:
        return {
            "kind": "permutation",
            "degree": self.degree,
            "generators": {lab: format_cycles(p) for lab, p in self._gens.items()},
        }

    def __repr__(self):
        return f"PermutationGroup({self.degree}, {self.spec()['generators']})"


def group_from_spec(spec: dict) -> Group:
    """Inverse of :meth:`Group.spec`."""
    kind = spec.get("kind")
    if kind == "free":
        return FreeGroup(int(spec["rank"]), spec.get("labels"))
    if kind == "free_product":
        return FreeProduct(spec["orders"], spec.get("labels"))
    if kind == "direct_product":
        return DirectProduct([group_from_spec(f) for f in spec["factors"]])
    if kind == "permutation":
        deg = int(spec["degree"])
        return PermutationGroup(deg, {lab: parse_cycles(c, deg) for lab, c in spec["generators"].items()})
    raise GroupError(f"unknown group kind {kind!r}")


@dataclass(frozen=True)
class MarkedSubset:
    """A finite, possibly non-symmetric subset U of a group.

    Elements are deduplicated and kept in shortlex order.  The identity is
    kept if supplied.
    """

    group: Group
    elements: tuple = field(default=())

    def __post_init__(self):
        uniq = {e: None for e in self.elements}
        if not uniq:
            raise GroupError("a marked subset needs at least one element")
        object.__setattr__(self, "elements", tuple(self.group.sort(uniq)))

    @classmethod
    def from_words(cls, group: Group, words: Iterable[str]) -> "MarkedSubset":
        return cls(group, tuple(group.parse(w) for w in words))

    @property
    def symmetric(self) -> bool:
        s = set(self.elements)
        return all(self.group.inv(e) in s for e in self.elements)

    @property
    def contains_identity(self) -> bool:
        return self.group.identity in self.elements

    def words(self) -> list[str]:
        return [self.group.format(e) for e in self.elements]

    def conjugate(self, g: Element) -> "MarkedSubset":
        """g^-1 U g."""
        gi = self.group.inv(g)
        return MarkedSubset(self.group, tuple(self.group.mul(self.group.mul(gi, u), g) for u in self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements


def symmetrize(U: MarkedSubset) -> MarkedSubset:
    """U union U^-1."""
    G = U.group
    return MarkedSubset(G, U.elements + tuple(G.inv(u) for u in U.elements))


def semigroup_layers(U: MarkedSubset, n: int, cap: int | None = None) -> list[set]:
    """Exact product sets ``[U^0, U^1, ..., U^n]`` (each a set of normal forms)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    G = U.group
    layers = [{G.identity}]
    for k in range(1, n + 1):
        nxt = {G.mul(x, u) for x in layers[-1] for u in U.elements}
        if cap is not None and len(nxt) > cap:
            raise BallLimitError(f"|U^{k}| = {len(nxt)} exceeds cap {cap}", partial=set().union(*layers), radius=k - 1)
        layers.append(nxt)
    return layers


def semigroup_ball(U: MarkedSubset, n: int, cap: int | None = None) -> set:
    """U^{<=n} = {1} u U u U^2 u ... u U^n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    G = U.group
    ball = {G.identity}
    frontier = {G.identity}
    for k in range(1, n + 1):
        frontier = {G.mul(x, u) for x in frontier for u in U.elements}
        ball |= frontier
        if cap is not None and len(ball) > cap:
            raise BallLimitError(f"|U^<={k}| = {len(ball)} exceeds cap {cap}", partial=ball, radius=k)
    return ball


def word_levels(U: MarkedSubset, n: int, cap: int | None = None) -> dict[Element, int]:
    """Map each element of U^{<=n} to the least k with the element in U^{<=k}."""
    G = U.group
    level = {G.identity: 0}
    frontier = {G.identity}
    for k in range(1, n + 1):
        frontier = {G.mul(x, u) for x in frontier for u in U.elements}
        for x in frontier:
            if x not in level:
                level[x] = k
        if cap is not None and len(level) > cap:
            raise BallLimitError(f"|U^<={k}| = {len(level)} exceeds cap {cap}", partial=set(level), radius=k)
    return level


def group_ball(G: Group, radius: int, cap: int | None = None) -> set:
    """Ball of the given radius for the symmetric standard generating set."""
    return semigroup_ball(symmetrize(MarkedSubset(G, tuple(G.generators()))), radius, cap)


def semigroup_generation_depth(U: MarkedSubset, max_depth: int, targets: Iterable[Element] | None = None) -> int | None:
    """Least L <= max_depth with every target inside U^{<=L}, else None.

    Default targets are the inverses of U, which certifies that U generates
    <U> as a semigroup.  Passing the standard generators and their inverses
    certifies that U generates the whole group as a semigroup.
    """
    G = U.group
    want = set(targets) if targets is not None else {G.inv(u) for u in U.elements}
    ball = {G.identity}
    frontier = {G.identity}
    want -= ball
    if not want:
        return 0
    for k in range(1, max_depth + 1):
        frontier = {G.mul(x, u) for x in frontier for u in U.elements} - ball
        ball |= frontier
        want -= frontier
        if not want:
            return k
    return None


def generates_group_as_semigroup(U: MarkedSubset, max_depth: int) -> int | None:
    """Depth certificate that U generates the ambient group as a semigroup."""
    G = U.group
    gens = G.generators()
    return semigroup_generation_depth(U, max_depth, gens + [G.inv(g) for g in gens])


def as_element(G: Group, x: Any) -> Element:
    return G.parse(x) if isinstance(x, str) else x
