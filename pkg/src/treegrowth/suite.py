"""The acceptance battery.

Each criterion runs seeded instances, checks the library's answers against
independent brute-force oracles and returns a verdict together with its
text artifacts (CSV tables and YAML certificates).  Artifacts never contain
timings, so two runs with the same seed must produce identical bytes.
"""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable

import yaml

from .displacement import (
    ProductAction,
    factor_transfer,
    min_displacement_exhaustive,
    min_on_segments,
    quasi_center,
)
from .groups import DirectProduct, FreeGroup, FreeProduct, MarkedSubset, group_ball
from .growth import (
    commutator_set,
    free_rank_verify,
    growth_rate,
    naive_commutator_sizes,
    product_set_counts,
    write_growth_csv,
)
from .loxodromic import build_free_base, pingpong_pair, short_loxodromic
from .rng import SplitMix64, random_regular_images, random_subset, random_transitive_images, random_word
from .schreier import (
    FiniteQuotient,
    Subgroup,
    chain_psg_bound,
    coset_structure,
    schreier_generators,
    schreier_generators_normal,
)
from .trees import CayleyTree, make_tree, translation_length

OMEGA_TARGET = 3.0
OMEGA_TOLERANCE = 0.05


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    budget: float
    seconds: float = 0.0
    artifacts: dict[str, str] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def in_budget(self) -> bool:
        return self.seconds < self.budget

    def line(self) -> str:
        verdict = "PASS" if self.passed and self.in_budget else "FAIL"
        budget = f", budget {self.budget:g}s" if self.budget != float("inf") else ""
        return f"[{verdict}] criterion {self.number}: {self.name}: {self.detail} ({self.seconds:.1f}s{budget})"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _yaml(doc) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False, allow_unicode=True)


def testbeds():
    """The two tree testbeds: F2 on its Cayley tree and Z/2*Z/3 on its Bass-Serre tree."""
    F2 = FreeGroup(2, ["a", "b"])
    M = FreeProduct([2, 3], ["s", "t"])
    return [("F2", F2, CayleyTree(F2)), ("Z2*Z3", M, make_tree(M))]


def cyclic_length(G, g: bytes) -> int:
    """Translation length read off the cyclic reduction of a normal form.

    In a free group every letter of the cyclically reduced core moves one
    edge along the axis.  In Z/m * Z/n each syllable of a cyclically reduced
    word crosses one edge of the Bass-Serre tree; a core of at most one
    syllable lies in a vertex group and is elliptic.
    """
    w = bytes(g)
    if isinstance(G, FreeGroup):
        while len(w) >= 2 and w[0] == w[-1] ^ 1:
            w = w[1:-1]
        return len(w)
    while len(w) >= 2 and G.factor_of[w[0]] == G.factor_of[w[-1]]:
        w = G.mul(w[-1:], w[:-1])
    return len(w) if len(w) >= 2 else 0


def _seed(seed: int, n: int) -> SplitMix64:
    return SplitMix64(seed * 1000003 + n)


# ----------------------------------------------------------------------------
# 1. short loxodromics
# ----------------------------------------------------------------------------


def criterion_short_loxodromic(seed: int = 0, instances: int = 200) -> CriterionResult:
    rows, failures, skipped = [], [], 0
    for name, G, A in testbeds():
        rng = _seed(seed, 1)
        done = 0
        while done < instances:
            S = random_subset(G, rng, 2, 6, 4)
            lam = min_displacement_exhaustive(S, A)[0]
            if lam == 0:
                skipped += 1
                continue
            cert = short_loxodromic(S, A)
            b, o = cert.b, cert.witness
            in_ball = b in S.elements or any(G.mul(x, y) == b for x in S for y in S)
            lox = cyclic_length(G, b) > 0
            far = A.dist(o, A.act(b, o)) >= lam - 10
            ok = in_ball and lox and far and cert.lambda_X == lam
            if not ok:
                failures.append(f"{name} {S.words()}")
            rows.append((name, done, " ; ".join(S.words()), cert.label, cert.tau, cert.distance, lam,
                         cert.provenance, "ok" if ok else "FAILED"))
            done += 1
    art = _csv(("testbed", "instance", "S", "b", "tau", "dist_o_bo", "lambda_X", "provenance", "check"), rows)
    detail = f"{len(rows)} certificates, {len(failures)} failures, {skipped} fixed-point sets skipped"
    return CriterionResult(1, "short loxodromic in S^<=2", not failures, detail, 10,
                           artifacts={"short_loxodromic.csv": art})


# ----------------------------------------------------------------------------
# 2. quasi-centers
# ----------------------------------------------------------------------------


def criterion_quasi_center(seed: int = 0, instances: int = 200) -> CriterionResult:
    rows, failures = [], []
    for name, G, A in testbeds():
        rng = _seed(seed, 2)
        o = A.base
        for i in range(instances):
            S = random_subset(G, rng, 2, 6, 4)
            x = A.act(random_word(G, 6, rng), o)
            q = quasi_center(S, o, x, A)
            so = A.act(q.s, o)
            on_segment = A.dist(o, q.z) + A.dist(q.z, so) == A.dist(o, so)
            lam_x = max(A.dist(x, A.act(s, x)) for s in S)
            lam_z = max(A.dist(q.z, A.act(s, q.z)) for s in S)
            seg_min = min(
                max(A.dist(v, A.act(s, v)) for s in S)
                for t in S for v in A.geodesic(o, A.act(t, o))
            )
            ok = on_segment and lam_z == q.value and lam_z <= 6 * lam_x + 3 and seg_min <= lam_z
            ok = ok and seg_min == min_on_segments(S, o, A)
            if not ok:
                failures.append(f"{name} {S.words()}")
            rows.append((name, i, " ; ".join(S.words()), A.format_vertex(x), A.format_vertex(q.z),
                         G.format(q.s), lam_x, lam_z, 6 * lam_x + 3, seg_min, "ok" if ok else "FAILED"))
    art = _csv(("testbed", "instance", "S", "x", "z", "s", "lambda_x", "lambda_z", "bound", "segment_min", "check"), rows)
    detail = f"{len(rows)} instances, {len(failures)} failures"
    return CriterionResult(2, "quasi-center bound", not failures, detail, 10, artifacts={"quasi_center.csv": art})


# ----------------------------------------------------------------------------
# 3. displacement transfer on F2 x F2
# ----------------------------------------------------------------------------


def _injective_projections(S: MarkedSubset) -> bool:
    k = len(S.group.factors)
    return all(len({s[i] for s in S}) == len(S) for i in range(k))


def criterion_transfer(seed: int = 0, instances: int = 50, M: int = 1) -> CriterionResult:
    F = FreeGroup(2, ["a", "b"])
    H = FreeGroup(2, ["c", "d"])
    G = DirectProduct([F, H])
    P = ProductAction(G, [CayleyTree(F), CayleyTree(H)])
    rng = _seed(seed, 3)
    rows, failures = [], []
    i = 0
    while i < instances:
        S = random_subset(G, rng, 8, 12, 3)
        if not _injective_projections(S):
            continue
        res = factor_transfer(S, P, M)
        oracle = tuple(
            min_displacement_exhaustive(P.factor_subset(S, j), t)[0] for j, t in enumerate(P.factors)
        )
        ok = res.succeeded and res.values == oracle and oracle[res.factor - 1] > M
        if not ok:
            failures.append(" ; ".join(S.words()))
        rows.append((i, len(S), " ; ".join(S.words()), res.factor or "", *res.values, *oracle, "ok" if ok else "FAILED"))
        i += 1
    art = _csv(("instance", "size", "S", "factor", "lambda_1", "lambda_2", "oracle_1", "oracle_2", "check"), rows)
    detail = f"{instances} sets at M = {M}, {len(failures)} failures"
    return CriterionResult(3, "displacement transfer", not failures, detail, 30, artifacts={"transfer.csv": art})


# ----------------------------------------------------------------------------
# 4. translation lengths
# ----------------------------------------------------------------------------


def criterion_translation_lengths(seed: int = 0, radius: int = 6, samples: int = 100) -> CriterionResult:
    rows, failures = [], []
    for name, G, A in testbeds():
        ball = G.sort(group_ball(G, radius))
        bad = 0
        for g in ball:
            tau = translation_length(g, A).tau
            lam = min_displacement_exhaustive(MarkedSubset(G, (g,)), A)[0]
            ok = tau == lam == cyclic_length(G, g)
            ok = ok and all(translation_length(G.power(g, n), A).tau == n * tau for n in range(2, 5))
            if not ok:
                bad += 1
                failures.append(f"{name} {G.format(g)}")
        rng = _seed(seed, 4)
        bad_conj = 0
        for _ in range(samples):
            g = ball[rng.below(len(ball))]
            h = random_word(G, radius, rng)
            if translation_length(G.conj(h, g), A).tau != translation_length(g, A).tau:
                bad_conj += 1
                failures.append(f"{name} conj {G.format(g)} by {G.format(h)}")
        rows.append((name, radius, len(ball), bad, samples, bad_conj))
    art = _csv(("testbed", "radius", "elements", "failures", "conjugacy_samples", "conjugacy_failures"), rows)
    detail = f"{sum(r[2] for r in rows)} elements, {len(failures)} failures"
    return CriterionResult(4, "translation-length identities", not failures, detail, 20,
                           artifacts={"translation_lengths.csv": art})


# ----------------------------------------------------------------------------
# 5. free semigroups
# ----------------------------------------------------------------------------


def criterion_free_semigroups(seed: int = 0, depth: int = 6) -> CriterionResult:
    F2 = FreeGroup(2, ["a", "b"])
    M = FreeProduct([2, 3], ["s", "t"])
    certs, checks = {}, {}
    A = CayleyTree(F2)
    c1 = pingpong_pair(F2.parse("a"), F2.parse("b a b^-1"), A, depth)
    checks["pingpong F2"] = c1.verified and free_rank_verify(F2, c1.base, depth).verified
    certs["pingpong_F2"] = c1.record()
    B = make_tree(M)
    c2 = pingpong_pair(M.parse("s t"), M.parse("t s"), B, depth)
    checks["pingpong Z2*Z3"] = c2.verified and free_rank_verify(M, c2.base, depth).verified
    certs["pingpong_Z2*Z3"] = c2.record()
    U = MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"])
    c3 = build_free_base(U, A, depth)
    counts = product_set_counts(MarkedSubset(F2, tuple(c3.base)), depth).counts
    checks["free base |T| = 4"] = len(c3.base) == 4
    checks["free base verified"] = c3.verified and free_rank_verify(F2, c3.base, depth).verified
    checks["|T^n| = 4^n"] = counts == [4 ** n for n in range(1, depth + 1)]
    certs["free_base_F2"] = c3.record()
    detail = ", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items())
    return CriterionResult(5, "free-semigroup certificates", all(checks.values()), detail, 60,
                           artifacts={"free_semigroups.yaml": _yaml(certs)}, checks=checks)


# ----------------------------------------------------------------------------
# 6. Schreier generators
# ----------------------------------------------------------------------------


def schreier_instances(seed: int = 0, count: int = 20):
    """Alternating normal (regular) and non-normal (point stabilizer) quotients of F2."""
    F2 = FreeGroup(2, ["a", "b"])
    rng = _seed(seed, 6)
    sets = [["a", "b", "a^-1", "b^-1"], ["a", "b", "b^-1 a^-1"]]
    out = []
    for i in range(count):
        d = 2 + rng.below(3)
        normal = i % 2 == 0
        imgs = random_regular_images(F2, d, rng) if normal else random_transitive_images(F2, d, rng)
        Q = FiniteQuotient(F2, d, imgs)
        H = Subgroup("kernel") if normal else Subgroup("stabilizer", 0)
        U = MarkedSubset.from_words(F2, sets[(i // 2) % 2])
        out.append((U, Q, H, normal))
    return out


def criterion_schreier(seed: int = 0, count: int = 20, cap: int = 50_000) -> CriterionResult:
    docs, failures, rows = [], [], []
    for i, (U, Q, H, normal) in enumerate(schreier_instances(seed, count)):
        G = U.group
        if normal:
            C = coset_structure(U, Q, H)
            res = schreier_generators_normal(U, C, cap=cap)
            d = C.index
            bound = d * d - d + 1
            size_bound = Fraction(len(U), d)
        else:
            res = schreier_generators(U, Q, H, cap=cap)
            d = res.index
            bound = factorial(d) ** 2 - factorial(d) + 1
            size_bound = Fraction(len(U), factorial(d))
        words_ok = all(
            G.product(U.elements[j] for j in w) == x and len(w) <= bound
            for x, w in zip(res.W, res.witnesses)
        )
        members_ok = all(H.contains(Q, x) for x in res.W)
        ok = (words_ok and members_ok and len(res.W) >= size_bound and res.checks.get("generates") is True
              and res.checks.get("tripwire") is True)
        if not ok:
            failures.append(i)
        rows.append((i, "normal" if normal else "stabilizer", d, " ; ".join(U.words()), len(res.W), str(size_bound),
                     res.max_length, bound, res.checks["tripwire_depth"], 2 * bound, "ok" if ok else "FAILED"))
        doc = res.record(U)
        doc["quotient"] = Q.spec()
        doc["subgroup"] = H.label()
        docs.append(doc)
    art = _csv(("instance", "kind", "index", "U", "size", "size_bound", "longest_witness", "exponent_bound",
                "tripwire_depth", "tripwire_requested", "check"), rows)
    shallow = sum(1 for r in rows if r[8] < r[9])
    detail = (f"{count} quotients, {len(failures)} failures; generation exact by folding, "
              f"bounded tripwire shortened by the element cap in {shallow} cases")
    return CriterionResult(6, "Schreier generators", not failures, detail, 30,
                           artifacts={"schreier.csv": art, "schreier.yaml": _yaml(docs)})


# ----------------------------------------------------------------------------
# 7. growth counts
# ----------------------------------------------------------------------------


def criterion_growth(seed: int = 0, threads: int = 1, n_pos: int = 14, n_sym: int = 12) -> CriterionResult:
    F2 = FreeGroup(2, ["a", "b"])
    pos = product_set_counts(MarkedSubset.from_words(F2, ["a", "b"]), n_pos, threads=threads)
    sym = product_set_counts(MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"]), n_sym, threads=threads)
    checks = {
        "|U^n| = 2^n": pos.counts == [2 ** n for n in range(1, n_pos + 1)],
        "|U^<=n| = 2 3^n - 1": sym.cumulative == [2 * 3 ** n - 1 for n in range(1, n_sym + 1)],
    }
    rate = growth_rate(sym)
    decreasing = all(x >= y for x, y in zip(rate.roots, rate.roots[1:]))
    checks["omega estimates decrease"] = decreasing
    checks["omega within 0.05 of 3"] = abs(rate.roots[-1] - OMEGA_TARGET) <= OMEGA_TOLERANCE
    rows = [(n, sym.ball(n), f"{rate.roots[n - 1]:.6f}", f"{rate.ratios[n - 1]:.6f}") for n in range(1, n_sym + 1)]
    detail = (", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items())
              + f"; |U^<=n|^(1/n) at n = {n_sym} is {rate.roots[-1]:.4f}")
    return CriterionResult(
        7, "growth counts and omega", all(checks.values()), detail, 120,
        artifacts={
            "growth_positive.csv": write_growth_csv(pos),
            "growth_symmetric.csv": write_growth_csv(sym),
            "omega.csv": _csv(("n", "ball", "root", "ratio"), rows),
        },
        checks=checks,
    )


# ----------------------------------------------------------------------------
# 8. commutators
# ----------------------------------------------------------------------------


def criterion_commutators(seed: int = 0, n: int = 6, naive_up_to: int = 4) -> CriterionResult:
    F2 = FreeGroup(2, ["a", "b"])
    S = MarkedSubset.from_words(F2, ["a", "b", "a^-1", "b^-1"])
    res = commutator_set(S, n)
    naive = naive_commutator_sizes(S, naive_up_to)
    meets = res.meets(Fraction(1, 2))
    ok = all(meets) and res.sizes[:naive_up_to] == naive
    rows = [(k, res.size(k), naive[k - 1] if k <= naive_up_to else "", "1/2", "holds" if meets[k - 1] else "violated")
            for k in range(1, n + 1)]
    detail = f"sizes {res.sizes}; naive agrees to n = {naive_up_to}: {res.sizes[:naive_up_to] == naive}"
    return CriterionResult(8, "commutator growth", ok, detail, 60,
                           artifacts={"commutators.csv": _csv(("n", "size", "naive", "c", "verdict"), rows)})


# ----------------------------------------------------------------------------
# 9. chaining arithmetic
# ----------------------------------------------------------------------------


def literal_chain_verdict(count: int, size: int, d: int, alpha: Fraction, beta: Fraction,
                          kernel_order: int, n: int) -> bool:
    """``count >= (a / (d! 2^(r/beta)) |U|)^((beta/r) n)`` with ``a = alpha/kernel_order``,
    written out literally; needs r/beta to be an integer so the base is rational."""
    r = factorial(d) ** 2 - factorial(d) + 1
    k = Fraction(r) / beta
    assert k.denominator == 1
    base = Fraction(alpha) / kernel_order / (factorial(d) * 2 ** k.numerator) * size
    e = beta * n / r
    # count >= base^e  <=>  count^q >= base^p  for e = p/q
    return count ** e.denominator >= base ** e.numerator


def criterion_chaining(seed: int = 0, n_max: int = 10, d: int = 2) -> CriterionResult:
    F2 = FreeGroup(2, ["a", "b"])
    rows, mismatches = [], 0
    for words in (["a", "b"], ["a", "b", "a^-1", "b^-1"]):
        series = product_set_counts(MarkedSubset.from_words(F2, words), n_max)
        for alpha in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            for beta in (Fraction(1, 2), Fraction(1), Fraction(3)):
                for ko in (1, 2):
                    v = chain_psg_bound(series, d, alpha, beta, ko)
                    for n in range(1, n_max + 1):
                        lit = literal_chain_verdict(series.count(n), series.size, d, alpha, beta, ko, n)
                        if lit != v.verdicts[n - 1]:
                            mismatches += 1
                        rows.append((" ; ".join(words), str(alpha), str(beta), ko, n, series.count(n),
                                     "holds" if v.verdicts[n - 1] else "violated",
                                     "holds" if lit else "violated"))
    detail = f"{len(rows)} exact verdicts, {mismatches} disagreements with the literal bound"
    return CriterionResult(9, "chaining arithmetic", mismatches == 0, detail, 5,
                           artifacts={"chaining.csv": _csv(
                               ("U", "alpha", "beta", "kernel_order", "n", "count", "verdict", "literal"), rows)})


# ----------------------------------------------------------------------------
# 10. determinism
# ----------------------------------------------------------------------------

CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_short_loxodromic,
    2: criterion_quasi_center,
    3: criterion_transfer,
    4: criterion_translation_lengths,
    5: criterion_free_semigroups,
    6: criterion_schreier,
    7: criterion_growth,
    8: criterion_commutators,
    9: criterion_chaining,
}


def run_criterion(k: int, seed: int = 0, threads: int = 1) -> CriterionResult:
    fn = CRITERIA[k]
    t0 = time.perf_counter()
    res = fn(seed, threads=threads) if k == 7 else fn(seed)
    res.seconds = time.perf_counter() - t0
    return res


def criterion_determinism(first: dict[int, CriterionResult], seed: int = 0, threads: int = 2) -> CriterionResult:
    """Re-run every criterion in ``first`` with another thread count and compare artifacts byte for byte."""
    t0 = time.perf_counter()
    diffs = []
    for k, res in sorted(first.items()):
        again = run_criterion(k, seed, threads)
        for name, text in res.artifacts.items():
            if again.artifacts.get(name) != text:
                diffs.append(name)
    out = CriterionResult(10, "determinism", not diffs,
                          f"{len(first)} criteria re-run with threads = {threads}, "
                          f"{len(diffs)} differing artifacts" + (f": {diffs}" if diffs else ""),
                          float("inf"))
    out.seconds = time.perf_counter() - t0
    return out


def run_suite(criteria=None, seed: int = 0, threads: int = 1) -> list[CriterionResult]:
    """Run the battery; criterion 10 re-runs the others with a different thread count."""
    ks = sorted(criteria) if criteria else list(range(1, 11))
    results = {}
    for k in ks:
        if k != 10:
            results[k] = run_criterion(k, seed, threads)
    out = [results[k] for k in ks if k != 10]
    if 10 in ks:
        base = results or {k: run_criterion(k, seed, threads) for k in CRITERIA}
        out.append(criterion_determinism(base, seed, threads=1 if threads > 1 else 2))
    return out


def summary_csv(results: list[CriterionResult]) -> str:
    rows = [(r.number, r.name, "pass" if r.passed else "fail", r.detail) for r in results]
    return _csv(("criterion", "name", "verdict", "detail"), rows)
