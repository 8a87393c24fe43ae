from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from treegrowth.config import ConfigError, load_config, parse_config
from treegrowth.displacement import ProductAction
from treegrowth.groups import FreeGroup
from treegrowth.schreier import Subgroup
from treegrowth.trees import BassSerreTree

CONFIGS = sorted((Path(__file__).parent.parent / "demos" / "configs").glob("*.yaml"))

GROWTH = """\
command: growth
group: {kind: free, rank: 2, labels: [a, b]}
U: [a, b]
params: {n_max: 4}
"""


def error_at(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text, source="cfg.yaml")
    return info.value


@pytest.mark.parametrize("path", CONFIGS, ids=[p.stem for p in CONFIGS])
def test_demo_configs_round_trip(path):
    cfg = load_config(path)
    assert parse_config(cfg.to_yaml()) == cfg
    assert parse_config(cfg.to_yaml()).to_yaml() == cfg.to_yaml()


words = st.lists(st.sampled_from(["a", "b", "a^-1", "b^-1", "a^2", "b a"]), min_size=1, max_size=3)


@given(
    st.lists(words.map(" ".join), min_size=1, max_size=4),
    st.integers(1, 20),
    st.fractions(Fraction(1, 9), 3).map(lambda q: q.limit_denominator(9)),
    st.integers(0, 2 ** 32),
)
def test_growth_configs_round_trip(U, n_max, alpha, seed):
    text = (
        f"command: growth\nseed: {seed}\ngroup: {{kind: free, rank: 2, labels: [a, b]}}\n"
        f"U: {U!r}\nparams: {{n_max: {n_max}, alpha: '{alpha}', beta: 1/2}}\n"
    )
    cfg = parse_config(text)
    assert parse_config(cfg.to_yaml()) == cfg
    assert cfg.rational("alpha") == alpha


def test_builders():
    cfg = parse_config(GROWTH)
    G = cfg.build_group()
    assert isinstance(G, FreeGroup)
    assert cfg.build_subset(G).words() == ["a", "b"]
    loxo = parse_config("command: loxo\ngroup: {kind: free_product, orders: [2, 3], labels: [s, t]}\nU: [s, t]\n")
    assert isinstance(loxo.build_action(), BassSerreTree)
    tr = load_config(Path(__file__).parent.parent / "demos" / "configs" / "transfer_f2xf2.yaml")
    assert isinstance(tr.build_action(), ProductAction)
    sch = load_config(Path(__file__).parent.parent / "demos" / "configs" / "schreier_stabilizer.yaml")
    Q, H = sch.build_quotient()
    # the config point is 1-based
    assert H == Subgroup("stabilizer", 0) and Q.degree == 3


def test_words_are_canonicalized():
    cfg = parse_config(GROWTH.replace("[a, b]\nparams", "[a a^-1 b, a^1]\nparams"))
    assert cfg.U == ["b", "a"]


def test_unknown_top_level_key_is_located():
    e = error_at(GROWTH + "colour: red\n")
    assert (e.line, e.column) == (5, 1) and "colour" in str(e)
    assert str(e).startswith("cfg.yaml:5:1:")


def test_bad_word_is_located():
    e = error_at(GROWTH.replace("U: [a, b]", "U: [a, c]"))
    assert (e.line, e.column) == (3, 8)


def test_missing_required_parameter():
    e = error_at(GROWTH.replace("params: {n_max: 4}", "params: {}"))
    assert "n_max" in str(e)


@pytest.mark.parametrize("edit,needle", [
    (("n_max: 4", "n_max: 0"), "n_max"),
    (("n_max: 4", "n_max: 4, alpha: 1/2"), "alpha and beta"),
    (("n_max: 4", "n_max: 4, d: 2"), "chaining"),
    (("n_max: 4", "n_max: 4, alpha: x, beta: 1"), "alpha"),
    (("command: growth", "command: grow"), "command"),
    (("rank: 2", "rank: 0"), "rank"),
])
def test_invalid_values(edit, needle):
    e = error_at(GROWTH.replace(*edit))
    assert needle in str(e) and e.line is not None


def test_syntax_errors_report_a_position():
    e = error_at("command: growth\nU: [a, b\n")
    assert e.line is not None and "YAML" in str(e)


def test_command_specific_checks():
    free = "group: {kind: free, rank: 2, labels: [a, b]}\nU: [a]\n"
    assert "direct product" in str(error_at("command: transfer\n" + free + "params: {M: 1}\n"))
    assert "tree action" in str(error_at(GROWTH + "action: {kind: cayley}\n"))
    stab = (
        "command: schreier\n" + free
        + "params:\n  quotient: {degree: 2, images: {a: '(1 2)', b: '()'}}\n"
        + "  subgroup: {kind: stabilizer, point: 3}\n"
    )
    assert "degree" in str(error_at(stab))


def test_caps():
    cfg = parse_config(GROWTH + "caps: {elements: 100, threads: 2}\n")
    assert cfg.cap_elements == 100 and cfg.threads == 2
    assert "caps" in str(error_at(GROWTH + "caps: {elements: 0}\n"))


def test_suite_needs_no_group():
    cfg = parse_config("command: suite\n")
    assert cfg.group is None and cfg.U is None
