"""One test per acceptance criterion.

Each test records a single ``[PASS]`` or ``[FAIL]`` line, printed together at
the end of the run.  The omega clause of criterion 7 is reported on its own
line so that the exact counts are not hidden behind it.
"""
import pytest

from treegrowth.suite import (
    OMEGA_TARGET,
    OMEGA_TOLERANCE,
    CRITERIA,
    criterion_determinism,
    run_criterion,
)

from conftest import ACCEPTANCE_LINES

_CACHE = {}


def result(k):
    if k not in _CACHE:
        _CACHE[k] = run_criterion(k, seed=0, threads=1)
    return _CACHE[k]


def report(line, ok):
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 8, 9])
def test_criterion(k):
    r = result(k)
    report(r.line(), r.passed and r.in_budget)


def test_criterion_7_counts():
    r = result(7)
    counts = {k: v for k, v in r.checks.items() if not k.startswith("omega within")}
    ok = all(counts.values()) and r.in_budget
    detail = ", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in counts.items())
    report(f"[{'PASS' if ok else 'FAIL'}] criterion 7 (counts): {detail} ({r.seconds:.1f}s, budget {r.budget:g}s)", ok)


def test_criterion_7_omega():
    r = result(7)
    text = r.artifacts["omega.csv"].strip().splitlines()[-1].split(",")
    n, root = int(text[0]), float(text[2])
    ok = r.checks[f"omega within {OMEGA_TOLERANCE:g} of {OMEGA_TARGET:g}"]
    report(f"[{'PASS' if ok else 'FAIL'}] criterion 7 (omega): |U^<=n|^(1/n) at n = {n} is {root:.4f}, "
           f"needs |. - {OMEGA_TARGET:g}| <= {OMEGA_TOLERANCE:g}", ok)


def test_criterion_10_determinism():
    first = {k: result(k) for k in CRITERIA}
    r = criterion_determinism(first, seed=0, threads=2)
    report(r.line(), r.passed)
