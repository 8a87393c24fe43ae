"""One function per experiment command, plus re-validation of their artifacts.

``execute`` turns a parsed config into an artifact (CSV text or a YAML
certificate) and a status.  ``verify`` takes an artifact produced earlier
and checks every claim in it again from the config, recomputing with
independent routines where one exists (exhaustive ball search instead of
descent, explicit products instead of ball membership, and so on).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import yaml

from .config import ExperimentConfig
from .displacement import (
    ProductAction,
    conjugate_reduce,
    displacement,
    displacement_at,
    factor_minima,
    factor_transfer,
    min_displacement,
    min_displacement_exhaustive,
    quasi_center,
)
from .groups import FreeGroup, semigroup_ball, symmetrize
from .growth import (
    commutator_set,
    free_rank_verify,
    product_set_counts,
    psg_check,
    write_growth_csv,
)
from .loxodromic import build_free_base, classify_action, pingpong_pair, short_loxodromic
from .schreier import (
    FoldedGraph,
    chain_psg_bound,
    chain_exponent,
    coset_structure,
    schreier_generators,
    schreier_generators_normal,
    subgroup_schreier_generators,
)
from .trees import independent, same_endpoint_pair, translation_length_value

OK = 0
CONFIG_ERROR = 2
INCONCLUSIVE = 3
VIOLATION = 4
HYPOTHESIS_UNMET = 5


@dataclass
class Outcome:
    text: str
    fmt: str  # "csv" or "yaml"
    status: int = OK
    message: str = ""
    extra: dict = field(default_factory=dict)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dict_csv(records: list[dict]) -> str:
    header = []
    for r in records:
        for k in r:
            if k not in header:
                header.append(k)
    return _csv(header, [[r.get(k, "") for k in header] for r in records])


def _certificate(cfg: ExperimentConfig, body: dict) -> str:
    doc = {"command": cfg.command, "config": cfg.to_dict(), "certificate": body}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False, allow_unicode=True)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def run_displace(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    A = cfg.build_action(G)
    S = cfg.build_subset(G)
    if isinstance(A, ProductAction):
        records = []
        for i, rep in enumerate(factor_minima(S, A), start=1):
            r = {"scope": f"factor {i}"}
            r.update(rep.record())
            records.append(r)
        at = displacement_at(S, A.base, A)
        g, trace = conjugate_reduce(S, A)
        r = {"scope": "product"}
        r.update(at.record())
        r.update({"conjugator": trace.conjugator_label, "reduced_value": trace.value,
                  "C1": trace.C1, "D": trace.D, "bound": trace.bound})
        records.append(r)
        if not trace.holds:
            return Outcome(_dict_csv(records), "csv", VIOLATION, "conjugation bound failed")
        return Outcome(_dict_csv(records), "csv")
    x = A.parse_vertex(cfg.params["x"]) if "x" in cfg.params else A.base
    rep = min_displacement(S, A, start=x)
    r = {"scope": "tree"}
    r.update(rep.record())
    if "o" in cfg.params:
        o = A.parse_vertex(cfg.params["o"])
        q = quasi_center(S, o, x, A)
        r.update({"quasi_center": A.format_vertex(q.z), "quasi_center_value": q.value,
                  "quasi_center_bound": q.bound})
        if not q.holds:
            return Outcome(_dict_csv([r]), "csv", VIOLATION, "quasi-center bound failed")
    return Outcome(_dict_csv([r]), "csv")


def run_transfer(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    P = cfg.build_action(G)
    S = cfg.build_subset(G)
    M = cfg.params["M"]
    res = factor_transfer(S, P, M)
    body = {
        "M": M,
        "size": len(S),
        "factor_values": list(res.values),
        "factor_minimizers": list(res.minimizers),
        "factor": res.factor,
        "verdict": (f"lambda(S, X_{res.factor}) > {M}" if res.succeeded
                    else f"hypothesis unmet: every factor has lambda(S, X_i) <= {M}, so |S| < N0({M})"),
    }
    text = _certificate(cfg, body)
    if not res.succeeded:
        return Outcome(text, "yaml", HYPOTHESIS_UNMET, f"no factor has lambda(S, X_i) > {M}")
    return Outcome(text, "yaml")


def run_loxo(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    A = cfg.build_action(G)
    S = cfg.build_subset(G)
    cert = short_loxodromic(S, A)
    return Outcome(_certificate(cfg, cert.record()), "yaml")


def run_pingpong(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    A = cfg.build_action(G)
    g, h = G.parse(cfg.params["g"]), G.parse(cfg.params["h"])
    cert = pingpong_pair(g, h, A, cfg.params["depth"])
    return Outcome(_certificate(cfg, cert.record()), "yaml")


def run_freebase(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    A = cfg.build_action(G)
    U = cfg.build_subset(G)
    cert = build_free_base(U, A, cfg.params.get("depth", 6), word_bound=cfg.params.get("word_bound", 4))
    return Outcome(_certificate(cfg, cert.record()), "yaml")


def _schreier(cfg: ExperimentConfig):
    G = cfg.build_group()
    U = cfg.build_subset(G)
    Q, H = cfg.build_quotient(G)
    cap = cfg.cap_elements or 50_000
    vd = cfg.params.get("verify_depth")
    if H.kind == "kernel":
        res = schreier_generators_normal(U, coset_structure(U, Q, H), vd, cap)
    else:
        res = schreier_generators(U, Q, H, vd, cap)
    return G, U, Q, H, res


def run_schreier(cfg: ExperimentConfig) -> Outcome:
    G, U, Q, H, res = _schreier(cfg)
    body = res.record(U)
    body["subgroup"] = H.label()
    text = _certificate(cfg, body)
    if not res.ok:
        return Outcome(text, "yaml", VIOLATION, f"Schreier checks failed: {res.checks}")
    return Outcome(text, "yaml")


def run_growth(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    U = cfg.build_subset(G)
    series = product_set_counts(U, cfg.params["n_max"], cap=cfg.cap_elements, threads=cfg.threads)
    alpha, beta = cfg.rational("alpha"), cfg.rational("beta")
    fit = psg_check(series, alpha, beta) if alpha is not None and beta is not None else None
    bad = series.check_invariants()
    chain = None
    extra = {}
    if "d" in cfg.params:
        chain = chain_psg_bound(series, cfg.params["d"], alpha, beta, cfg.params.get("kernel_order", 1))
        extra = {
            "chained_bound": [f"{x:.10g}" for x in chain.bounds],
            "chained_verdict": ["holds" if ok else "violated" for ok in chain.verdicts],
        }
    text = write_growth_csv(series, fit, extra=extra)
    if bad:
        return Outcome(text, "csv", VIOLATION, "; ".join(bad))
    if chain is not None and not chain.satisfied:
        return Outcome(text, "csv", VIOLATION, f"chained bound fails at n = {chain.first_violation}")
    if fit is not None and not fit.satisfied:
        return Outcome(text, "csv", VIOLATION, f"declared bound fails at n = {fit.first_violation}")
    if series.truncated:
        return Outcome(text, "csv", INCONCLUSIVE,
                       f"stopped after n = {series.n_done}: element cap {cfg.cap_elements} reached")
    return Outcome(text, "csv")


def run_commutators(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    S = cfg.build_subset(G)
    n = cfg.params["n"]
    res = commutator_set(S, n, cfg.cap_elements)
    c = cfg.rational("c")
    meets = res.meets(c) if c is not None else [None] * n
    rows = [(k, res.size(k), "" if c is None else str(c),
             "" if m is None else ("holds" if m else "violated")) for k, m in zip(range(1, n + 1), meets)]
    text = _csv(("n", "size", "c", "verdict"), rows)
    if c is not None and not all(meets):
        return Outcome(text, "csv", VIOLATION, f"|C(S^<=n, S^<=n)| < {c} n at n = {meets.index(False) + 1}")
    return Outcome(text, "csv")


def run_classify(cfg: ExperimentConfig) -> Outcome:
    G = cfg.build_group()
    A = cfg.build_action(G)
    U = cfg.build_subset(G)
    t = classify_action(U, A)
    body = {"kind": t.kind, "witnesses": t.witnesses}
    body.update({k: str(v) for k, v in t.evidence.items()})
    return Outcome(_certificate(cfg, body), "yaml")


def run_suite(cfg: ExperimentConfig) -> Outcome:
    from .suite import run_suite as battery, summary_csv

    results = battery(cfg.params.get("criteria"), cfg.seed, cfg.threads)
    text = summary_csv(results)
    failed = [r.number for r in results if not r.passed]
    out = Outcome(text, "csv", VIOLATION if failed else OK,
                  f"criteria failed: {failed}" if failed else "")
    out.extra["results"] = results
    return out


COMMANDS = {
    "displace": run_displace,
    "transfer": run_transfer,
    "loxo": run_loxo,
    "pingpong": run_pingpong,
    "freebase": run_freebase,
    "schreier": run_schreier,
    "growth": run_growth,
    "commutators": run_commutators,
    "classify": run_classify,
    "suite": run_suite,
}


def execute(cfg: ExperimentConfig) -> Outcome:
    return COMMANDS[cfg.command](cfg)


# ----------------------------------------------------------------------------
# re-validation
# ----------------------------------------------------------------------------


def _verify_loxo(cfg, c) -> list[str]:
    G = cfg.build_group()
    A = cfg.build_action(G)
    S = cfg.build_subset(G)
    bad = []
    b = G.parse(c["element"])
    o = A.parse_vertex(c["witness"])
    if b not in S.elements and not any(G.mul(x, y) == b for x in S for y in S):
        bad.append("b is not a product of at most two elements of S")
    bo = A.act(b, o)
    tau = max(0, A.dist(o, A.act(b, bo)) - A.dist(o, bo))
    if tau <= 0 or tau != c["tau"]:
        bad.append("b is not loxodromic with the recorded translation length")
    lam = min_displacement_exhaustive(S, A)[0]
    if lam != c["lambda_X"]:
        bad.append(f"lambda(S, X) is {lam}, not {c['lambda_X']}")
    if A.dist(o, bo) != c["distance"] or c["distance"] < lam - 10:
        bad.append("dist(o, bo) is wrong or below lambda(S, X) - 10")
    return bad


def _verify_free_base(G, labels, depth, counts) -> list[str]:
    T = [G.parse(w) for w in labels]
    res = free_rank_verify(G, T, depth)
    bad = []
    if not res.verified:
        bad.append(f"words collide: {res.collision_words(labels)}")
    elif res.counts != counts:
        bad.append("recorded counts are wrong")
    return bad


def _verify_pingpong(cfg, c) -> list[str]:
    G = cfg.build_group()
    g, h = G.parse(cfg.params["g"]), G.parse(cfg.params["h"])
    allowed = {(x, y) for x in (g, G.inv(g)) for y in (h, G.inv(h))}
    T = [G.parse(w) for w in c["base"]]
    bad = [] if tuple(T) in allowed else ["the pair is not built from g and h"]
    return bad + _verify_free_base(G, c["base"], c["depth"], c["counts"])


def _verify_freebase(cfg, c) -> list[str]:
    G = cfg.build_group()
    U = cfg.build_subset(G)
    p = c["parameters"]
    bad = []
    b, f, h = G.parse(p["b"]), G.parse(p["f"]), G.parse(p["h"])
    one = b in U.elements
    if not one and not any(G.mul(x, y) == b for x in U for y in U):
        bad.append("b is not in U^<=2")
    ulen = 1 if one else 2
    if f not in U.elements:
        bad.append("f is not in U")
    if h != G.mul(f, G.power(b, p["n"])):
        bad.append("h is not f b^n")
    hk = G.power(h, p["n3"])
    U0 = [G.parse(w) for w in p["U0"]]
    if any(s not in U.elements for s in U0):
        bad.append("U0 is not a subset of U")
    if [G.format(G.mul(s, hk)) for s in U0] != c["base"]:
        bad.append("T is not {s h^n3 : s in U0}")
    if p["kappa"] != 1 + p["n3"] * (1 + p["n"] * ulen):
        bad.append("kappa does not bound the U-length of T")
    return bad + _verify_free_base(G, c["base"], c["depth"], c["counts"])


def _verify_transfer(cfg, c) -> list[str]:
    G = cfg.build_group()
    P = cfg.build_action(G)
    S = cfg.build_subset(G)
    vals = [min_displacement_exhaustive(P.factor_subset(S, i), t)[0] for i, t in enumerate(P.factors)]
    bad = []
    if vals != c["factor_values"]:
        bad.append(f"factor values are {vals}, not {c['factor_values']}")
    M = c["M"]
    want = next((i + 1 for i, v in enumerate(vals) if v > M), None)
    if want != c["factor"]:
        bad.append(f"the least factor with lambda > M is {want}, not {c['factor']}")
    return bad


def _verify_schreier(cfg, c) -> list[str]:
    G = cfg.build_group()
    U = cfg.build_subset(G)
    Q, H = cfg.build_quotient(G)
    words = {w: i for i, w in enumerate(U.words())}
    bad = []
    W = []
    for gen in c["generators"]:
        x = G.parse(gen["element"])
        W.append(x)
        parts = [] if gen["u_word"] == "1" else gen["u_word"].split(" . ")
        if any(p not in words for p in parts):
            bad.append(f"{gen['element']}: witness uses letters outside U")
            continue
        if G.product(U.elements[words[p]] for p in parts) != x:
            bad.append(f"{gen['element']}: witness word multiplies to something else")
        if len(parts) > c["exponent_bound"]:
            bad.append(f"{gen['element']}: witness longer than {c['exponent_bound']}")
        if not H.contains(Q, x):
            bad.append(f"{gen['element']} is not in H")
    if len(W) < Fraction(c["size_bound"]):
        bad.append("fewer generators than the size bound")
    d = c["index"]
    normal = c["normal"]
    if c["exponent_bound"] != (d * d - d + 1 if normal else chain_exponent(d)):
        bad.append("wrong exponent bound for the index")
    if isinstance(G, FreeGroup):
        fg = FoldedGraph(W)
        if not all(fg.reads(s) for s in subgroup_schreier_generators(Q, H)):
            bad.append("W does not generate H")
    return bad


def _verify_classify(cfg, c) -> list[str]:
    G = cfg.build_group()
    A = cfg.build_action(G)
    U = cfg.build_subset(G)
    ws = [G.parse(w) for w in c["witnesses"]]
    lam = min_displacement_exhaustive(U, A)[0]
    bad = []
    if c["kind"] == "Bounded":
        v = A.parse_vertex(c["fixed_vertex"])
        if displacement(U, v, A) != 0:
            bad.append("the fixed vertex is moved")
        return bad
    if lam == 0:
        bad.append("U has a fixed vertex, the action is bounded")
    ball2 = semigroup_ball(U, 2)
    if ws[0] not in ball2 or translation_length_value(A, ws[0]) == 0:
        bad.append("first witness is not a loxodromic in U^<=2")
    if c["kind"] == "General":
        if translation_length_value(A, ws[1]) == 0 or not independent(ws[0], ws[1], A):
            bad.append("witnesses are not independent loxodromics")
    elif c["kind"] == "Lineal":
        if not all(same_endpoint_pair(ws[0], u, A) for u in U):
            bad.append("some generator does not preserve the endpoint pair of the witness")
    return bad


def _verify_by_rerun(cfg, text) -> list[str]:
    fresh = execute(cfg).text
    return [] if fresh == text else ["recomputed output differs"]


def _verify_growth(cfg, text) -> list[str]:
    bad = _verify_by_rerun(cfg, text)
    G = cfg.build_group()
    U = cfg.build_subset(G)
    rows = list(csv.DictReader(io.StringIO(text)))
    ball = {G.identity}
    layer = {G.identity}
    for r in rows:
        if r["verdict"] == "truncated":
            break
        layer = {G.mul(x, u) for x in layer for u in U}
        ball |= layer
        if int(r["count_exact"]) != len(layer) or int(r["cumulative"]) != len(ball):
            bad.append(f"counts at n = {r['n']} are wrong")
    return bad


def _verify_commutators(cfg, text) -> list[str]:
    bad = _verify_by_rerun(cfg, text)
    G = cfg.build_group()
    S = symmetrize(cfg.build_subset(G))
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows[:4]:
        ball = semigroup_ball(S, int(r["n"]))
        if len({G.commutator(g, h) for g in ball for h in ball}) != int(r["size"]):
            bad.append(f"size at n = {r['n']} is wrong")
    return bad


def _verify_displace(cfg, text) -> list[str]:
    bad = _verify_by_rerun(cfg, text)
    G = cfg.build_group()
    A = cfg.build_action(G)
    S = cfg.build_subset(G)
    rows = list(csv.DictReader(io.StringIO(text)))
    if isinstance(A, ProductAction):
        for i, t in enumerate(A.factors):
            v = min_displacement_exhaustive(A.factor_subset(S, i), t)[0]
            if int(rows[i]["min_value"]) != v:
                bad.append(f"factor {i + 1} minimum is {v}")
    else:
        v = min_displacement_exhaustive(S, A)[0]
        if int(rows[0]["min_value"]) != v:
            bad.append(f"minimum is {v}")
    return bad


def _verify_suite(cfg, text) -> list[str]:
    return _verify_by_rerun(cfg, text)


_CERT_VERIFIERS = {
    "loxo": _verify_loxo,
    "pingpong": _verify_pingpong,
    "freebase": _verify_freebase,
    "transfer": _verify_transfer,
    "schreier": _verify_schreier,
    "classify": _verify_classify,
}
_TEXT_VERIFIERS = {
    "growth": _verify_growth,
    "commutators": _verify_commutators,
    "displace": _verify_displace,
    "suite": _verify_suite,
}


def verify(cfg: ExperimentConfig, text: str) -> list[str]:
    """Re-check an artifact emitted for ``cfg``; returns the failed claims."""
    if cfg.command in _CERT_VERIFIERS:
        doc = yaml.safe_load(text)
        if not isinstance(doc, dict) or doc.get("command") != cfg.command:
            raise ValueError(f"not a {cfg.command} certificate")
        if doc.get("config") != cfg.to_dict():
            return ["certificate was produced from a different config"]
        return _CERT_VERIFIERS[cfg.command](cfg, doc["certificate"])
    return _TEXT_VERIFIERS[cfg.command](cfg, text)
