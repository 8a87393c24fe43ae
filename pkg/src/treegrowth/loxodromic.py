"""Short loxodromic elements, ping-pong pairs and free sub-semigroups on trees.

All the inequalities involved are exact on trees, so every unspecified
constant of the constructions is replaced by the least integer that makes
the relevant inequality hold, and the outcome is re-verified independently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .displacement import displacement, min_displacement
from .errors import InconclusiveError, InvariantViolation, PreconditionError
from .groups import Element, MarkedSubset, group_ball, semigroup_ball
from .growth import free_rank_verify
from .trees import (
    AxisFingerprint,
    TreeAction,
    Vertex,
    axes_equal,
    axis_projection,
    fingerprint,
    gromov_product,
    same_endpoint_pair,
    translation_length_value,
)


@dataclass
class LoxodromicCertificate:
    b: Element
    label: str
    witness: Vertex
    witness_label: str
    distance: int
    lambda_X: int
    lambda_o: int
    tau: int
    fingerprint: AxisFingerprint
    provenance: str
    membership: str
    u_length: int
    constants: dict = field(default_factory=dict)

    def check(self, S: MarkedSubset, A: TreeAction) -> list[str]:
        """Re-verify the numeric claims from scratch; returns the failures."""
        bad = []
        if self.b not in semigroup_ball(S, 2):
            bad.append("b is not in S^<=2")
        if translation_length_value(A, self.b) <= 0:
            bad.append("b is not loxodromic")
        if A.dist(self.witness, A.act(self.b, self.witness)) != self.distance:
            bad.append("recorded distance is wrong")
        if self.distance < self.lambda_X - 10:
            bad.append("dist(o, bo) < lambda(S, X) - 10")
        if min_displacement(S, A).min_value != self.lambda_X:
            bad.append("recorded lambda(S, X) is wrong")
        return bad

    def record(self) -> dict:
        return {
            "element": self.label,
            "witness": self.witness_label,
            "distance": self.distance,
            "lambda_X": self.lambda_X,
            "lambda_o": self.lambda_o,
            "tau": self.tau,
            "axis_core": self.fingerprint.core,
            "axis_sign": self.fingerprint.sign,
            "axis_anchor": self.fingerprint.anchor,
            "provenance": self.provenance,
            "membership": self.membership,
            "u_length": self.u_length,
            "constants": {k: str(v) for k, v in self.constants.items()},
        }


def _shortlex(S: MarkedSubset):
    return list(S.elements)


def short_loxodromic(S: MarkedSubset, A: TreeAction) -> LoxodromicCertificate:
    """A loxodromic b in S^{<=2} with ``dist(o, bo) >= lambda(S, X) - 10``.

    The base point is a minimizer of the displacement on the barycentric
    subdivision (so it minimizes over the real tree up to half-edges).  With
    ``delta = min(lambda/30, 1)`` and ``L0 = 4 delta`` the two cases are tried
    in order: some ``s`` in S0 that is loxodromic with ``<o, s^2 o>_{so} <= L0``
    gives ``b = s``; otherwise some s with
    ``max(<t^-1 o, s o>_o, <t o, s^-1 o>_o) <= L0`` gives ``b = ts``.  If
    neither fires (possible only when the minimizer is not a vertex of the
    subdivision) S u S^2 is scanned deterministically.
    """
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    G = S.group
    lam = min_displacement(S, A)
    if lam.min_value == 0:
        raise PreconditionError("S has a global fixed vertex", witness=lam.minimizer_label)
    A2 = A.subdivision()
    rep2 = min_displacement(S, A2, start=A.to_subdivision(lam.minimizer))
    o = rep2.minimizer
    lam2 = rep2.min_value
    # constants in the units of the subdivision (all distances doubled)
    delta = 2 * min(Fraction(lam2, 60), Fraction(1))
    L0 = 4 * delta
    d = {s: A2.dist(o, A2.act(s, o)) for s in S}
    S0 = [s for s in _shortlex(S) if d[s] >= lam2 - 2 * L0 - delta]
    t = min(S, key=lambda s: (-d[s], G.key(s)))
    to = A2.act(t, o)
    tinv_o = A2.act(G.inv(t), o)
    b, prov, ulen = None, None, 0
    for s in S0:
        so = A2.act(s, o)
        if translation_length_value(A2, s) > 0 and gromov_product(A2, o, A2.act(s, so), so) <= L0:
            b, prov, ulen = s, "case 1: s loxodromic with small Gromov product", 1
            break
    if b is None:
        for s in S0:
            so = A2.act(s, o)
            sinv_o = A2.act(G.inv(s), o)
            gp = max(gromov_product(A2, tinv_o, so, o), gromov_product(A2, to, sinv_o, o))
            ts = G.mul(t, s)
            if gp <= L0 and translation_length_value(A2, ts) > 0:
                b, prov, ulen = ts, "case 2: product ts", 2
                break
    ov = A.from_subdivision(o)
    if b is None:
        cands = [(1, s) for s in S] + [(2, G.mul(x, y)) for x in S for y in S]
        for k, c in cands:
            if translation_length_value(A, c) > 0 and A.dist(ov, A.act(c, ov)) >= lam.min_value - 10:
                b, prov, ulen = c, "scan of S and S^2", k
                break
    if b is None:
        raise InvariantViolation("no loxodromic element in S^<=2 although lambda(S, X) > 0")
    dist = A.dist(ov, A.act(b, ov))
    cert = LoxodromicCertificate(
        b=b,
        label=G.format(b),
        witness=ov,
        witness_label=A.format_vertex(ov),
        distance=dist,
        lambda_X=lam.min_value,
        lambda_o=displacement(S, ov, A),
        tau=translation_length_value(A, b),
        fingerprint=fingerprint(A, b),
        provenance=prov,
        membership="one-sided S^<=2, checked in semigroup_ball(S, 2)",
        u_length=ulen,
        constants={"delta": delta / 2, "L0": L0 / 2, "lambda_subdivided": Fraction(lam2, 2)},
    )
    if b not in semigroup_ball(S, 2) or cert.tau <= 0 or dist < lam.min_value - 10:
        raise InvariantViolation("short loxodromic certificate failed its own check", evidence=cert)
    return cert


# ----------------------------------------------------------------------------
# joint loxodromics
# ----------------------------------------------------------------------------


@dataclass
class JointVerdict:
    holds: bool
    quarter: Fraction
    gromov: Fraction
    product_loxodromic: bool | None = None
    tau: int | None = None
    quasi_constant: Fraction | None = None


def _path(A: TreeAction, points: list[Vertex]) -> list[Vertex]:
    out = [points[0]]
    for a, b in zip(points, points[1:]):
        out.extend(A.geodesic(a, b)[1:])
    return out


def joint_loxodromic(g: Element, h: Element, o: Vertex, A: TreeAction, periods: int = 3) -> JointVerdict:
    """Test ``min(|go-o|, |ho-o|)/4 >= L >= max(<go, h^-1 o>_o, <g^-1 o, h o>_o)`` for some L > 0.

    When it holds, gh is checked to be loxodromic and the path
    ``... (gh)^i([o, go] . g[o, ho]) ...`` over ``2 periods + 1`` periods is
    measured: the returned constant is the largest ratio of arc length to
    ``distance + 1`` between two of its vertices.
    """
    G = A.group
    go, ho = A.act(g, o), A.act(h, o)
    quarter = Fraction(min(A.dist(o, go), A.dist(o, ho)), 4)
    gp = max(
        gromov_product(A, go, A.act(G.inv(h), o), o),
        gromov_product(A, A.act(G.inv(g), o), ho, o),
    )
    holds = quarter > 0 and quarter >= gp
    v = JointVerdict(holds, quarter, gp)
    if not holds:
        return v
    gh = G.mul(g, h)
    v.tau = translation_length_value(A, gh)
    v.product_loxodromic = v.tau > 0
    corners = []
    for i in range(-periods, periods + 1):
        p = G.power(gh, i)
        corners += [A.act(p, o), A.act(G.mul(p, g), o)]
    corners.append(A.act(G.power(gh, periods + 1), o))
    path = _path(A, corners)
    worst = Fraction(1)
    for i in range(len(path)):
        for j in range(i + 1, len(path)):
            r = Fraction(j - i, A.dist(path[i], path[j]) + 1)
            if r > worst:
                worst = r
    v.quasi_constant = worst
    return v


# ----------------------------------------------------------------------------
# free semigroups
# ----------------------------------------------------------------------------


@dataclass
class FreeSemigroupCertificate:
    base: list[Element]
    labels: list[str]
    depth: int
    verified: bool
    counts: list[int]
    parameters: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {
            "base": self.labels,
            "depth": self.depth,
            "verified": self.verified,
            "counts": self.counts,
            "parameters": self.parameters,
        }


def pingpong_pair(g: Element, h: Element, A: TreeAction, depth: int) -> FreeSemigroupCertificate:
    """First pair among (g, h), (g, h^-1), (g^-1, h), (g^-1, h^-1) generating a
    free semigroup, verified exactly on all words of length <= depth."""
    G = A.group
    if translation_length_value(A, g) == 0 or translation_length_value(A, h) == 0:
        raise PreconditionError("both elements must be loxodromic")
    if axes_equal(A, g, h):
        raise PreconditionError("g and h have the same endpoint pair")
    tried = []
    for x, y in ((g, h), (g, G.inv(h)), (G.inv(g), h), (G.inv(g), G.inv(h))):
        res = free_rank_verify(G, [x, y], depth)
        labels = [G.format(x), G.format(y)]
        if res.verified:
            return FreeSemigroupCertificate(
                [x, y], labels, depth, True, res.counts,
                {"pair": labels, "tried": tried + [labels]},
            )
        tried.append(labels)
    raise InconclusiveError(f"no pair verified at depth {depth}", evidence=tried)


@dataclass
class ActionType:
    kind: str
    witnesses: list[str]
    elements: list[Element]
    evidence: dict = field(default_factory=dict)

    HOROCYCLIC = "Horocyclic: not observed, excluded for these testbeds"


def classify_action(U: MarkedSubset, A: TreeAction) -> ActionType:
    """Bounded, Lineal or General for the action of <U> on the tree.

    Bounded iff the generators have a common fixed vertex (then so does <U>).
    Otherwise a short loxodromic b exists in U^{<=2}; the action is lineal iff
    every generator preserves the endpoint pair of b, and otherwise b and
    ``u b u^-1`` for a generator u outside E(b) are independent witnesses.
    Focal and horocyclic actions cannot occur on these trees.
    """
    G = U.group
    rep = min_displacement(U, A)
    if rep.min_value == 0:
        return ActionType("Bounded", [rep.minimizer_label], [], {"fixed_vertex": rep.minimizer_label})
    cert = short_loxodromic(U, A)
    b = cert.b
    for u in U:
        if not same_endpoint_pair(b, u, A):
            w = G.conj(u, b)
            return ActionType(
                "General", [cert.label, G.format(w)], [b, w],
                {"outside": G.format(u), "horocyclic": ActionType.HOROCYCLIC},
            )
    return ActionType("Lineal", [cert.label], [b], {"axis": cert.fingerprint.core, "horocyclic": ActionType.HOROCYCLIC})


def _gp(A, o, x, y):
    return gromov_product(A, A.act(x, o), A.act(y, o), o)


def local_to_global(A: TreeAction, o: Vertex, T: list[Element]) -> bool:
    """Tree conditions ensuring that all words over T are distinct.

    With ``g(t, t') = <t^-1 o, t' o>_o`` (backtracking at a joint),
    ``l(t) = |o - t o|`` and ``G = max g``: every ``g(t, t') + g(t', t'') < l(t')``
    and distinct t, t' diverge early: ``<t o, t' o>_o < l(t) - G``.
    """
    G = A.group
    inv = {t: G.inv(t) for t in T}
    length = {t: A.dist(o, A.act(t, o)) for t in T}
    g = {(x, y): _gp(A, o, inv[x], y) for x in T for y in T}
    top = max(g.values())
    for x in T:
        for y in T:
            for z in T:
                if g[x, y] + g[y, z] >= length[y]:
                    return False
    for i, x in enumerate(T):
        for y in T[i + 1:]:
            if _gp(A, o, x, y) >= min(length[x], length[y]) - top:
                return False
    return True


def build_free_base(U: MarkedSubset, A: TreeAction, depth: int, word_bound: int = 4,
                    max_power: int = 32, max_n3: int = 8) -> FreeSemigroupCertificate:
    """Free base ``T = {s h^n3 : s in U0}`` inside a bounded power of U.

    b is a short loxodromic and f in U lies outside E(b).  For n = 1, 2, ...
    the element ``h = f b^n`` is kept when it is loxodromic, independent of b
    and translates further than U displaces the projection of o to its axis.
    ``F = E(h) n E(b)`` is taken inside the word ball of radius
    ``word_bound``; U0 keeps one generator per coset sF outside F, and n3 is
    the least exponent (at most ``max_n3``) for which the local-to-global
    conditions hold.  The first n admitting such an n3 is used and the base
    is then verified exactly.
    """
    G = U.group
    cls = classify_action(U, A)
    if cls.kind != "General":
        raise PreconditionError(f"action is {cls.kind}, not of general type", witness=cls.witnesses)
    cert = short_loxodromic(U, A)
    b, o = cert.b, cert.witness
    f = next(u for u in U if not same_endpoint_pair(b, u, A))
    ball = G.sort(group_ball(G, word_bound))
    found = None
    for n in range(1, max_power + 1):
        h = G.mul(f, G.power(b, n))
        tau = translation_length_value(A, h)
        if tau == 0 or axes_equal(A, h, b):
            continue
        if tau <= displacement(U, axis_projection(A, h, o), A):
            continue
        F = [x for x in ball if same_endpoint_pair(h, x, A) and same_endpoint_pair(b, x, A)]
        Fset = set(F)
        U0 = []
        for s in U:
            if s in Fset or any(G.mul(G.inv(r), s) in Fset for r in U0):
                continue
            U0.append(s)
        if not U0:
            continue
        for n3 in range(1, max_n3 + 1):
            hk = G.power(h, n3)
            T = [G.mul(s, hk) for s in U0]
            if len(set(T)) == len(T) and local_to_global(A, o, T):
                found = (n, h, F, U0, n3, T)
                break
        if found:
            break
    if found is None:
        raise InconclusiveError(f"no n <= {max_power} with n3 <= {max_n3} satisfies the local-to-global conditions")
    n, h, F, U0, n3, T = found
    res = free_rank_verify(G, T, depth)
    labels = [G.format(t) for t in T]
    if not res.verified:
        raise InvariantViolation(
            "free base check failed", evidence=res.collision_words(labels)
        )
    kappa = 1 + n3 * (1 + n * cert.u_length)
    params = {
        "b": cert.label,
        "f": G.format(f),
        "n": n,
        "h": G.format(h),
        "F": [G.format(x) for x in F],
        "F_radius": word_bound,
        "U0": [G.format(s) for s in U0],
        "n3": n3,
        "kappa": kappa,
        "witness": A.format_vertex(o),
    }
    return FreeSemigroupCertificate(T, labels, depth, True, res.counts, params)
