"""Exact product-set growth, commutator sets and growth inequalities.

Every verdict is decided with integers or ``Fraction``; floats only appear in
display columns (growth-rate estimates).
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groups import Element, Group, MarkedSubset, symmetrize, word_levels

CSV_COLUMNS = ("n", "count_exact", "cumulative", "bound_value", "verdict")


@dataclass
class GrowthSeries:
    """Exact counts ``|U^n|`` and ``|U^{<=n}|`` for ``n = 1..len(counts)``."""

    size: int
    counts: list[int]
    cumulative: list[int]
    n_max: int
    truncated: bool = False
    words: list[str] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list, compare=False, repr=False)

    @property
    def n_done(self) -> int:
        return len(self.counts)

    def count(self, n: int) -> int:
        return 1 if n == 0 else self.counts[n - 1]

    def ball(self, n: int) -> int:
        return 1 if n == 0 else self.cumulative[n - 1]

    def check_invariants(self) -> list[str]:
        """Monotonicity of ``|U^n|`` and submultiplicativity of ``|U^{<=n}|``."""
        bad = []
        for n in range(1, self.n_done + 1):
            if self.count(n) < self.count(n - 1):
                bad.append(f"|U^{n}| < |U^{n - 1}|")
        for n in range(1, self.n_done + 1):
            for m in range(1, self.n_done + 1 - n):
                if self.ball(n + m) > self.ball(n) * self.ball(m):
                    bad.append(f"|U^<={n + m}| > |U^<={n}| |U^<={m}|")
        return bad


def _expand(args):
    G, chunk, U = args
    return {G.mul(x, u) for x in chunk for u in U}


def product_set_counts(U: MarkedSubset, n_max: int, cap: int | None = None, threads: int = 1) -> GrowthSeries:
    """Layered enumeration ``U^n = U^{n-1} U`` with dedup on normal forms.

    ``cap`` bounds the number of stored elements (layer plus union); when it
    would be exceeded the series stops early with ``truncated`` set.  With
    ``threads > 1`` each layer is split over worker processes; the result is
    the same set whatever the schedule.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    G = U.group
    gens = list(U.elements)
    layer = {G.identity}
    ball = {G.identity}
    series = GrowthSeries(len(U), [], [], n_max, words=U.words())
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for _ in range(n_max):
            t0 = time.perf_counter()
            if pool is not None and len(layer) > 4096:
                items = G.sort(layer)
                k = max(1, -(-len(items) // (4 * threads)))
                chunks = [(G, items[i:i + k], gens) for i in range(0, len(items), k)]
                nxt = set()
                for part in pool.map(_expand, chunks):
                    nxt |= part
            else:
                nxt = {G.mul(x, u) for x in layer for u in gens}
            new_ball = len(ball) + sum(1 for x in nxt if x not in ball)
            if cap is not None and len(nxt) + new_ball > cap:
                series.truncated = True
                break
            ball |= nxt
            layer = nxt
            series.counts.append(len(layer))
            series.cumulative.append(len(ball))
            series.seconds.append(time.perf_counter() - t0)
    finally:
        if pool is not None:
            pool.shutdown()
    return series


def naive_product_set_counts(U: MarkedSubset, n_max: int) -> GrowthSeries:
    """Reference counts by multiplying out every word of length n (exponential)."""
    from itertools import product

    G = U.group
    counts, cumulative = [], []
    ball = {G.identity}
    for n in range(1, n_max + 1):
        layer = {G.product(w) for w in product(U.elements, repeat=n)}
        ball |= layer
        counts.append(len(layer))
        cumulative.append(len(ball))
    return GrowthSeries(len(U), counts, cumulative, n_max, words=U.words())


# ----------------------------------------------------------------------------
# growth inequalities
# ----------------------------------------------------------------------------


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def psg_holds(count: int, base: Fraction, exponent: Fraction) -> bool:
    """Exactly decide ``count >= base ** exponent`` for rational base > 0 and exponent >= 0."""
    p, q = exponent.numerator, exponent.denominator
    # count^q >= base^p   <=>   count^q * den^p >= num^p
    return count ** q * base.denominator ** p >= base.numerator ** p


@dataclass
class GrowthFit:
    alpha: Fraction
    beta: Fraction
    size: int
    verdicts: list[bool]
    bounds: list[float]
    omega: list[float]
    max_beta: float | None

    @property
    def satisfied(self) -> bool:
        return all(self.verdicts)

    @property
    def first_violation(self) -> int | None:
        return next((i + 1 for i, ok in enumerate(self.verdicts) if not ok), None)


def psg_check(series: GrowthSeries, alpha, beta) -> GrowthFit:
    """Check ``|U^n| >= (alpha |U|)^(beta n)`` for every recorded n."""
    alpha, beta = _frac(alpha), _frac(beta)
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    base = alpha * series.size
    verdicts, bounds = [], []
    for n in range(1, series.n_done + 1):
        verdicts.append(psg_holds(series.count(n), base, beta * n))
        bounds.append(float(base) ** float(beta * n))
    max_beta = None
    if base > 1 and series.n_done:
        max_beta = min(math.log(series.count(n)) / (n * math.log(base)) for n in range(1, series.n_done + 1))
    return GrowthFit(alpha, beta, series.size, verdicts, bounds, growth_rate(series).roots, max_beta)


@dataclass
class GrowthRate:
    roots: list[float]
    envelope: list[float]
    ratios: list[float]


def growth_rate(series: GrowthSeries) -> GrowthRate:
    """``|U^{<=n}|^(1/n)``, its running minimum (an upper bound for the limit,
    by submultiplicativity) and the successive ratios ``|U^{<=n}| / |U^{<=n-1}|``."""
    if series.n_done == 0:
        raise ValueError("empty series")
    roots, env, ratios = [], [], []
    for n in range(1, series.n_done + 1):
        r = series.ball(n) ** (1.0 / n)
        roots.append(r)
        env.append(min(r, env[-1]) if env else r)
        ratios.append(series.ball(n) / series.ball(n - 1))
    return GrowthRate(roots, env, ratios)


def write_growth_csv(series: GrowthSeries, fit: GrowthFit | None = None, out=None,
                     extra: dict[str, list] | None = None) -> str:
    """RFC 4180 CSV with columns n, count_exact, cumulative, bound_value, verdict.

    ``extra`` appends columns, one value per recorded n.
    """
    extra = extra or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS + tuple(extra))
    for n in range(1, series.n_done + 1):
        if fit is not None:
            bound = f"{fit.bounds[n - 1]:.10g}"
            verdict = "holds" if fit.verdicts[n - 1] else "violated"
        else:
            bound, verdict = "", ""
        w.writerow((n, series.count(n), series.ball(n), bound, verdict) + tuple(v[n - 1] for v in extra.values()))
    if series.truncated:
        w.writerow((series.n_done + 1, "", "", "", "truncated") + ("",) * len(extra))
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def read_growth_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


# ----------------------------------------------------------------------------
# free semigroups
# ----------------------------------------------------------------------------


@dataclass
class FreeRankResult:
    verified: bool
    depth: int
    counts: list[int]
    collision: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def collision_words(self, labels: Sequence[str]) -> tuple[str, str] | None:
        if self.collision is None:
            return None
        return tuple(" ".join(labels[i] for i in w) or "1" for w in self.collision)


def free_rank_verify(G: Group, T: Sequence[Element], depth: int) -> FreeRankResult:
    """Whether all words of length <= depth over T have distinct normal forms.

    On success ``|T^n| = |T|^n`` for every n <= depth.  On failure the first
    colliding pair of index words (in enumeration order) is returned.
    """
    T = list(T)
    if not T:
        raise ValueError("T must be nonempty")
    if G.identity in T:
        return FreeRankResult(False, depth, [], ((), (T.index(G.identity),)))
    if len(set(T)) < len(T):
        i = next(i for i in range(len(T)) if T[i] in T[:i])
        return FreeRankResult(False, depth, [], ((T.index(T[i]),), (i,)))
    seen: dict[Element, tuple[int, ...]] = {G.identity: ()}
    layer = [((), G.identity)]
    counts = []
    for _ in range(depth):
        nxt = []
        for w, x in layer:
            for j, t in enumerate(T):
                y = G.mul(x, t)
                wj = w + (j,)
                if y in seen:
                    return FreeRankResult(False, depth, counts, (seen[y], wj))
                seen[y] = wj
                nxt.append((wj, y))
        layer = nxt
        counts.append(len(layer))
    return FreeRankResult(True, depth, counts)


# ----------------------------------------------------------------------------
# commutators
# ----------------------------------------------------------------------------


@dataclass
class CommutatorResult:
    n: int
    sizes: list[int]
    witnesses: dict[Element, tuple[int, Element, Element]]

    def size(self, n: int) -> int:
        return self.sizes[n - 1]

    def meets(self, c: Fraction) -> list[bool]:
        """``|C(S^{<=n}, S^{<=n})| >= c n`` for each n."""
        return [s >= c * n for n, s in enumerate(self.sizes, start=1)]


def commutator_set(S: MarkedSubset, n: int, cap: int | None = None) -> CommutatorResult:
    """Exact sizes of ``C(S^{<=k}, S^{<=k}) = {[g, h]}`` for k = 1..n.

    The ball of the symmetrized set is computed once; each commutator is
    recorded at the least k for which both arguments lie in the ball, with
    the first witnessing pair in shortlex order.  ``[h, g] = [g, h]^-1``
    halves the work.
    """
    G = S.group
    levels = word_levels(symmetrize(S), n, cap)
    items = G.sort(levels)
    lv = [levels[x] for x in items]
    inv = [G.inv(x) for x in items]
    best: dict[Element, tuple[int, Element, Element]] = {}
    for i, g in enumerate(items):
        for j in range(i, len(items)):
            h = items[j]
            k = max(lv[i], lv[j])
            c = G.mul(G.mul(G.mul(g, h), inv[i]), inv[j])
            old = best.get(c)
            if old is None or k < old[0]:
                best[c] = (k, g, h)
            ci = G.inv(c)
            old = best.get(ci)
            if old is None or k < old[0]:
                best[ci] = (k, h, g)
    sizes = []
    for k in range(1, n + 1):
        sizes.append(sum(1 for v in best.values() if v[0] <= k))
    return CommutatorResult(n, sizes, best)


def naive_commutator_sizes(S: MarkedSubset, n: int) -> list[int]:
    """Reference: recompute every pair separately at each level."""
    from .groups import semigroup_ball

    G = S.group
    out = []
    for k in range(1, n + 1):
        ball = semigroup_ball(symmetrize(S), k)
        out.append(len({G.commutator(g, h) for g in ball for h in ball}))
    return out
