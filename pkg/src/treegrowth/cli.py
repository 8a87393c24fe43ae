"""Command-line driver: ``treegrowth <command> --config FILE [--out FILE]``.

Exit status: 0 success, 2 config error, 3 inconclusive (bounded search or
element cap ran out), 4 invariant violation, 5 hypothesis unmet (the input
lies outside an operation's hypotheses, e.g. a set with a global fixed
point, or a transfer set too small for any factor to exceed M).

With ``--verify`` the artifact at ``--out`` is read back and every claim in
it is re-checked against the config instead of being rewritten.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import COMMANDS, ConfigError, ExperimentConfig, load_config, parse_config
from .errors import InconclusiveError, InvariantViolation, PreconditionError
from .experiments import (
    CONFIG_ERROR,
    HYPOTHESIS_UNMET,
    INCONCLUSIVE,
    OK,
    VIOLATION,
    Outcome,
    execute,
    verify,
)
from .groups import BallLimitError, GroupError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treegrowth", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="experiment config (YAML); optional only for suite")
    p.add_argument("--out", help="output file (suite: directory for the summary and artifacts); default stdout")
    p.add_argument("--verify", action="store_true", help="re-validate the artifact at --out instead of writing it")
    p.add_argument("--threads", type=int, help="worker processes for product-set enumeration")
    p.add_argument("--cap-elements", type=int, help="maximum number of stored group elements")
    return p


def _load(args) -> ExperimentConfig:
    if args.config is None:
        if args.command != "suite":
            raise ConfigError(f"{args.command} needs --config")
        cfg = parse_config("command: suite\n", source="<default>")
    else:
        cfg = load_config(args.config)
    if cfg.command != args.command:
        raise ConfigError(f"config is for {cfg.command!r}, not {args.command!r}", source=args.config)
    caps = dict(cfg.caps)
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        caps["threads"] = args.threads
    if args.cap_elements is not None:
        if args.cap_elements < 1:
            raise ConfigError("--cap-elements must be at least 1")
        caps["elements"] = args.cap_elements
    return dataclasses.replace(cfg, caps=caps)


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _emit(cfg: ExperimentConfig, out: Outcome, path: str | None):
    if cfg.command == "suite":
        results = out.extra["results"]
        for r in results:
            print(r.line(), file=sys.stderr)
        if path is not None:
            os.makedirs(path, exist_ok=True)
            _write(os.path.join(path, "summary.csv"), out.text)
            for r in results:
                for name, text in r.artifacts.items():
                    _write(os.path.join(path, f"criterion{r.number:02d}_{name}"), text)
            return
    _write(path, out.text)


def _verify(cfg: ExperimentConfig, path: str | None) -> int:
    if path is None:
        raise ConfigError("--verify needs --out pointing at the artifact to check")
    if cfg.command == "suite":
        path = os.path.join(path, "summary.csv")
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    try:
        failures = verify(cfg, text)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"unreadable artifact: {e}", source=path) from None
    for f in failures:
        print(f"verify: {f}", file=sys.stderr)
    if failures:
        return VIOLATION
    print(f"verify: {path} re-validated", file=sys.stderr)
    return OK


def run(command: str, config_path: str | None, out_path: str | None = None, verify_only: bool = False,
        threads: int | None = None, cap_elements: int | None = None) -> int:
    """Programmatic entry point with the same behaviour as the command line."""
    argv = [command]
    if config_path is not None:
        argv += ["--config", config_path]
    if out_path is not None:
        argv += ["--out", out_path]
    if verify_only:
        argv.append("--verify")
    if threads is not None:
        argv += ["--threads", str(threads)]
    if cap_elements is not None:
        argv += ["--cap-elements", str(cap_elements)]
    return main(argv)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    except OSError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    try:
        if args.verify:
            return _verify(cfg, args.out)
        out = execute(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    except PreconditionError as e:
        print(f"hypothesis unmet: {e} (witness: {e.witness})", file=sys.stderr)
        return HYPOTHESIS_UNMET
    except GroupError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    except (InconclusiveError, BallLimitError) as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return INCONCLUSIVE
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return VIOLATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    _emit(cfg, out, args.out)
    if out.message:
        label = {INCONCLUSIVE: "inconclusive", VIOLATION: "invariant violation",
                 HYPOTHESIS_UNMET: "hypothesis unmet"}.get(out.status, "note")
        print(f"{label}: {out.message}", file=sys.stderr)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
