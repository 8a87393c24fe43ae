"""Experiment configs: one YAML document per experiment.

A config names the command, the group, the tree action, the marked set U
(words of whitespace-separated labels, ``x^-1`` for inverses), the command
parameters, a seed and resource caps.  Parsing validates everything up front
and reports the line and column of the offending node.  A parsed config
serializes to a canonical document that parses back to the same config.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from .displacement import ProductAction
from .groups import DirectProduct, Group, GroupError, MarkedSubset, group_from_spec
from .schreier import FiniteQuotient, Subgroup
from .trees import make_tree

COMMANDS = (
    "displace", "transfer", "loxo", "pingpong", "freebase",
    "schreier", "growth", "commutators", "classify", "suite",
)
TREE_COMMANDS = ("displace", "transfer", "loxo", "pingpong", "freebase", "classify")
TOP_KEYS = ("command", "seed", "group", "action", "U", "params", "caps")
CAP_KEYS = ("elements", "threads")

# parameter name -> (checker, required)
_PARAMS: dict[str, dict[str, tuple[str, bool]]] = {
    "displace": {"x": ("vertex", False), "o": ("vertex", False)},
    "transfer": {"M": ("nonneg", True)},
    "loxo": {},
    "pingpong": {"g": ("word", True), "h": ("word", True), "depth": ("pos", True)},
    "freebase": {"depth": ("pos", False), "word_bound": ("pos", False)},
    "schreier": {"quotient": ("quotient", True), "subgroup": ("subgroup", False),
                 "verify_depth": ("pos", False)},
    "growth": {"n_max": ("pos", True), "alpha": ("rational", False), "beta": ("rational", False),
               "d": ("pos", False), "kernel_order": ("pos", False)},
    "commutators": {"n": ("pos", True), "c": ("rational", False)},
    "classify": {},
    "suite": {"criteria": ("int_list", False), "instances": ("pos", False)},
}


class ConfigError(ValueError):
    """Malformed config; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str = "<config>"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:{line}:{column}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class _Marks:
    """Source positions of every node, keyed by its path from the root."""

    def __init__(self, root, source: str):
        self.source = source
        self.at: dict[tuple, Any] = {}
        self.keys: dict[tuple, Any] = {}
        if root is not None:
            self._walk(root, ())

    def _walk(self, node, path):
        self.at[path] = node.start_mark
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                p = path + (k.value,)
                self.keys[p] = k.start_mark
                self._walk(v, p)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk(v, path + (i,))

    def error(self, path: tuple, message: str, key: bool = False) -> ConfigError:
        p = tuple(path)
        mark = (self.keys.get(p) if key else None) or self.at.get(p)
        while mark is None and p:
            p = p[:-1]
            mark = self.at.get(p)
        if mark is None:
            return ConfigError(message, source=self.source)
        return ConfigError(message, mark.line + 1, mark.column + 1, self.source)


@dataclass
class ExperimentConfig:
    command: str
    group: dict | None = None
    U: list[str] | None = None
    action: dict | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    caps: dict = field(default_factory=dict)

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        out: dict[str, Any] = {"command": self.command, "seed": self.seed}
        if self.group is not None:
            out["group"] = self.group
        if self.action is not None:
            out["action"] = self.action
        if self.U is not None:
            out["U"] = list(self.U)
        out["params"] = dict(self.params)
        out["caps"] = dict(self.caps)
        return out

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=False, allow_unicode=True)

    # -- live objects --------------------------------------------------------
    def build_group(self) -> Group:
        return group_from_spec(self.group)

    def build_action(self, G: Group | None = None):
        G = G or self.build_group()
        return build_action(G, self.action)

    def build_subset(self, G: Group | None = None) -> MarkedSubset:
        G = G or self.build_group()
        return MarkedSubset.from_words(G, self.U)

    def build_quotient(self, G: Group | None = None) -> tuple[FiniteQuotient, Subgroup]:
        G = G or self.build_group()
        q = self.params["quotient"]
        Q = FiniteQuotient(G, q["degree"], q["images"])
        s = self.params.get("subgroup", {"kind": "kernel"})
        H = Subgroup(s["kind"], s.get("point", 1) - 1)
        return Q, H

    def rational(self, name: str, default=None) -> Fraction | None:
        v = self.params.get(name, default)
        return None if v is None else Fraction(str(v))

    @property
    def cap_elements(self) -> int | None:
        return self.caps.get("elements")

    @property
    def threads(self) -> int:
        return self.caps.get("threads", 1)


def build_action(G: Group, spec: dict | None):
    """A tree for free groups and free products, a product of trees for direct products."""
    spec = spec or {}
    if isinstance(G, DirectProduct):
        fs = spec.get("factors") or [{} for _ in G.factors]
        if len(fs) != len(G.factors):
            raise GroupError("one action per direct factor is required")
        return ProductAction(G, [make_tree(F, f.get("kind"), f.get("base")) for F, f in zip(G.factors, fs)])
    return make_tree(G, spec.get("kind"), spec.get("base"))


# ----------------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------------


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _rational(x) -> Fraction:
    if _is_int(x):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError


def _rational_text(q: Fraction) -> str | int:
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _check_param(kind: str, value, path, marks: _Marks, G: Group | None):
    if kind in ("pos", "nonneg"):
        lo = 1 if kind == "pos" else 0
        if not _is_int(value) or value < lo:
            raise marks.error(path, f"{path[-1]}: expected an integer >= {lo}, got {value!r}")
        return value
    if kind == "rational":
        try:
            q = _rational(value)
        except (ValueError, ZeroDivisionError):
            raise marks.error(path, f"{path[-1]}: expected a rational number such as 1/4, got {value!r}") from None
        if q <= 0:
            raise marks.error(path, f"{path[-1]}: expected a positive rational")
        return _rational_text(q)
    if kind == "word":
        if not isinstance(value, str):
            raise marks.error(path, "expected a word")
        try:
            G.parse(value)
        except GroupError as e:
            raise marks.error(path, str(e)) from None
        return value
    if kind == "vertex":
        if not isinstance(value, str):
            raise marks.error(path, "expected a vertex written as text")
        return value
    if kind == "int_list":
        if not isinstance(value, list) or not all(_is_int(v) for v in value):
            raise marks.error(path, "expected a list of integers")
        return list(value)
    if kind == "quotient":
        if not isinstance(value, dict):
            raise marks.error(path, "expected a mapping with degree and images")
        for k in value:
            if k not in ("degree", "images"):
                raise marks.error(path + (k,), f"unknown quotient key {k!r}", key=True)
        deg = value.get("degree")
        if not _is_int(deg) or deg < 1:
            raise marks.error(path + ("degree",), "quotient degree must be a positive integer")
        imgs = value.get("images")
        if not isinstance(imgs, dict):
            raise marks.error(path + ("images",), "images must map generator labels to cycle strings")
        for lab, cyc in imgs.items():
            if not isinstance(cyc, str):
                raise marks.error(path + ("images", lab), "write each image in cycle notation, e.g. '(1 2)(3 4)'")
        try:
            Q = FiniteQuotient(G, deg, imgs)
        except (GroupError, ValueError) as e:
            raise marks.error(path, str(e)) from None
        return Q.spec()
    if kind == "subgroup":
        if not isinstance(value, dict) or value.get("kind") not in ("kernel", "stabilizer"):
            raise marks.error(path, "subgroup must be {kind: kernel} or {kind: stabilizer, point: p}")
        extra = set(value) - {"kind", "point"}
        if extra:
            k = sorted(extra)[0]
            raise marks.error(path + (k,), f"unknown subgroup key {k!r}", key=True)
        if value["kind"] == "kernel":
            return {"kind": "kernel"}
        p = value.get("point", 1)
        if not _is_int(p) or p < 1:
            raise marks.error(path + ("point",), "point must be a positive integer (1-based)")
        return {"kind": "stabilizer", "point": p}
    raise AssertionError(kind)


def _normalize_group(spec, marks: _Marks, path=("group",)) -> dict:
    if not isinstance(spec, dict):
        raise marks.error(path, "group must be a mapping with a kind")
    kind = spec.get("kind")
    allowed = {
        "free": ("kind", "rank", "labels"),
        "free_product": ("kind", "orders", "labels"),
        "direct_product": ("kind", "factors"),
        "permutation": ("kind", "degree", "generators"),
    }
    if kind not in allowed:
        raise marks.error(path + ("kind",), f"unknown group kind {kind!r}; expected one of {sorted(allowed)}")
    for k in spec:
        if k not in allowed[kind]:
            raise marks.error(path + (k,), f"unknown key {k!r} for a {kind} group", key=True)
    if kind == "direct_product":
        fs = spec.get("factors")
        if not isinstance(fs, list) or not fs:
            raise marks.error(path + ("factors",), "a direct product needs at least one factor")
        spec = {"kind": kind, "factors": [_normalize_group(f, marks, path + ("factors", i)) for i, f in enumerate(fs)]}
    try:
        return group_from_spec(spec).spec()
    except (GroupError, KeyError, TypeError, ValueError) as e:
        msg = f"missing field {e}" if isinstance(e, KeyError) else str(e)
        raise marks.error(path, f"invalid group: {msg}") from None


def _normalize_action(spec, G: Group, marks: _Marks) -> dict:
    path = ("action",)
    if not isinstance(spec, dict):
        raise marks.error(path, "action must be a mapping")
    try:
        if isinstance(G, DirectProduct):
            fs = spec.get("factors", [{} for _ in G.factors])
            extra = set(spec) - {"factors"}
            if extra:
                k = sorted(extra)[0]
                raise marks.error(path + (k,), f"unknown action key {k!r}", key=True)
            if not isinstance(fs, list) or len(fs) != len(G.factors):
                raise marks.error(path + ("factors",), f"give one action per factor ({len(G.factors)})")
            out = []
            for i, (F, f) in enumerate(zip(G.factors, fs)):
                out.append(_tree_spec(F, f, marks, path + ("factors", i)))
            return {"factors": out}
        return _tree_spec(G, spec, marks, path)
    except GroupError as e:
        raise marks.error(path, str(e)) from None


def _tree_spec(G: Group, spec, marks: _Marks, path) -> dict:
    if not isinstance(spec, dict):
        raise marks.error(path, "tree action must be a mapping")
    for k in spec:
        if k not in ("kind", "base"):
            raise marks.error(path + (k,), f"unknown tree key {k!r}", key=True)
    base = spec.get("base")
    if base is not None and not isinstance(base, str):
        raise marks.error(path + ("base",), "base vertex must be written as text")
    try:
        t = make_tree(G, spec.get("kind"), base)
    except (GroupError, ValueError) as e:
        raise marks.error(path, str(e)) from None
    return t.spec()


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse and validate one experiment document."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        m = e.problem_mark or e.context_mark
        line, col = (m.line + 1, m.column + 1) if m is not None else (None, None)
        raise ConfigError(f"YAML syntax error: {e.problem or e.context}", line, col, source) from None
    marks = _Marks(root, source)
    if not isinstance(data, dict):
        raise marks.error((), "the config must be a mapping")
    for k in data:
        if k not in TOP_KEYS:
            raise marks.error((k,), f"unknown key {k!r}; expected one of {list(TOP_KEYS)}", key=True)
    cmd = data.get("command")
    if cmd not in COMMANDS:
        raise marks.error(("command",), f"command must be one of {list(COMMANDS)}, got {cmd!r}")
    seed = data.get("seed", 0)
    if not _is_int(seed) or seed < 0:
        raise marks.error(("seed",), "seed must be a non-negative integer")

    G = None
    group = action = U = None
    if "group" in data:
        group = _normalize_group(data["group"], marks)
        G = group_from_spec(group)
    elif cmd != "suite":
        raise marks.error((), f"command {cmd!r} needs a group")
    if G is not None:
        if cmd in TREE_COMMANDS:
            action = _normalize_action(data.get("action") or {}, G, marks)
        elif "action" in data:
            raise marks.error(("action",), f"{cmd} does not use a tree action", key=True)
    if "U" in data or cmd != "suite":
        raw = data.get("U")
        if not isinstance(raw, list) or not raw:
            raise marks.error(("U",), "U must be a nonempty list of words")
        U = []
        for i, w in enumerate(raw):
            if _is_int(w):
                w = str(w)
            if not isinstance(w, str):
                raise marks.error(("U", i), "each element of U must be a word")
            try:
                U.append(G.format(G.parse(w)))
            except GroupError as e:
                raise marks.error(("U", i), str(e)) from None

    params_raw = data.get("params") or {}
    if not isinstance(params_raw, dict):
        raise marks.error(("params",), "params must be a mapping")
    schema = _PARAMS[cmd]
    params = {}
    for k, v in params_raw.items():
        if k not in schema:
            raise marks.error(("params", k), f"unknown parameter {k!r} for {cmd}; expected one of {sorted(schema)}", key=True)
        params[k] = _check_param(schema[k][0], v, ("params", k), marks, G)
    for k, (_, required) in schema.items():
        if required and k not in params:
            raise marks.error(("params",), f"{cmd} needs parameter {k!r}")
    params = {k: params[k] for k in schema if k in params}
    if cmd == "growth":
        if ("alpha" in params) != ("beta" in params):
            raise marks.error(("params",), "give alpha and beta together")
        if ("d" in params or "kernel_order" in params) and "alpha" not in params:
            raise marks.error(("params",), "chaining (d, kernel_order) needs alpha and beta")
    if cmd == "transfer" and not isinstance(G, DirectProduct):
        raise marks.error(("group",), "transfer needs a direct product group")
    if cmd == "displace" and isinstance(G, DirectProduct) and ("x" in params or "o" in params):
        raise marks.error(("params",), "explicit points are only supported for single trees")
    if cmd == "schreier" and params.get("subgroup", {}).get("kind") == "stabilizer":
        if params["subgroup"]["point"] > params["quotient"]["degree"]:
            raise marks.error(("params", "subgroup", "point"), "point exceeds the quotient degree")
    if action is not None and cmd == "displace":
        A = build_action(G, action)
        for k in ("x", "o"):
            if k in params:
                try:
                    A.parse_vertex(params[k])
                except (GroupError, ValueError, KeyError) as e:
                    raise marks.error(("params", k), f"bad vertex: {e}") from None

    caps_raw = data.get("caps") or {}
    if not isinstance(caps_raw, dict):
        raise marks.error(("caps",), "caps must be a mapping")
    caps = {}
    for k, v in caps_raw.items():
        if k not in CAP_KEYS:
            raise marks.error(("caps", k), f"unknown cap {k!r}; expected one of {list(CAP_KEYS)}", key=True)
        if not _is_int(v) or v < 1:
            raise marks.error(("caps", k), "caps must be positive integers")
        caps[k] = v
    caps = {k: caps[k] for k in CAP_KEYS if k in caps}
    return ExperimentConfig(cmd, group, U, action, params, seed, caps)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))
