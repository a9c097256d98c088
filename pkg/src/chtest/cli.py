"""Command-line driver: ``chtest distill|select|mutate|evaluate``.

Exit codes: 0 success, 2 input error (bad source, bad model document,
unknown class), 3 the full test suite does not pass on the snapshot.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import DEFAULT_CONFIG, TestConfig
from .distiller import describe_delta, distill_delta, distill_initial
from .frontend import FrontendError, load_snapshot
from .model import ChangeModelError, ResolutionMode, deserialize
from .mutator import BaselineFailure, generate_mutants
from .pipeline import evaluate
from .runtime import default_step_budget
from .selector import Selector, UnknownClass

EXIT_OK, EXIT_INPUT, EXIT_BASELINE = 0, 2, 3


def _mode(name: str, constructors: bool) -> ResolutionMode:
    return ResolutionMode.poly(constructors) if name == "poly" else ResolutionMode.static(constructors)


def _config(args) -> TestConfig:
    kw = {}
    if getattr(args, "tests_pattern", None):
        kw["test_method_pattern"] = args.tests_pattern
    if getattr(args, "test_class_pattern", None):
        kw["test_class_pattern"] = args.test_class_pattern
    return TestConfig(**kw) if kw else DEFAULT_CONFIG


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report_frontend(e: FrontendError) -> int:
    for d in e.diagnostics:
        print(d, file=sys.stderr)
    return EXIT_INPUT


def cmd_distill(args) -> int:
    cfg = _config(args)
    mode = _mode(args.mode, args.constructors)
    try:
        dirs = [load_snapshot(d) for d in args.dirs]
    except FrontendError as e:
        return _report_frontend(e)
    if len(dirs) == 1:
        model = distill_initial(dirs[0], mode, cfg)
        print(describe_delta(list(model)), end="", file=sys.stderr)
    else:
        old, new = dirs
        if args.base:
            try:
                model = deserialize(Path(args.base).read_text(encoding="utf-8"))
            except ChangeModelError as e:
                print(f"{args.base}: {e}", file=sys.stderr)
                return EXIT_INPUT
        else:
            model = distill_initial(old, mode, cfg)
        try:
            delta = distill_delta(model, old, new, cfg)
        except ChangeModelError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        print(describe_delta(delta), end="", file=sys.stderr)
    _write(args.output, model.dumps())
    return EXIT_OK


def cmd_select(args) -> int:
    cfg = _config(args)
    try:
        model = deserialize(Path(args.model).read_text(encoding="utf-8"))
    except (OSError, ChangeModelError) as e:
        print(f"{args.model}: {e}", file=sys.stderr)
        return EXIT_INPUT
    sel = Selector(model, cfg)
    if args.cls is not None:
        try:
            tests = sel.for_class(args.cls)
        except UnknownClass:
            print(f"unknown class {args.cls!r}", file=sys.stderr)
            return EXIT_INPUT
        lines = sorted(tests)
        payload = {"class": args.cls, "tests": lines}
    else:
        try:
            result = sel.select(args.change or [])
        except ChangeModelError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        for d in result.diagnostics:
            print(f"note: {d}", file=sys.stderr)
        lines = sorted(result.all_tests())
        payload = result.to_json()
        payload["tests"] = lines
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for t in lines:
            print(t)
    return EXIT_OK


def cmd_mutate(args) -> int:
    try:
        p = load_snapshot(args.dir)
    except FrontendError as e:
        return _report_frontend(e)
    for m in generate_mutants(p, cfg=_config(args)):
        print(f"{m.mutantId}\t{m.operator.value}\t{m.location.line}:{m.location.col}\t{m.description}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    try:
        p = load_snapshot(args.dir)
    except FrontendError as e:
        return _report_frontend(e)
    try:
        ev = evaluate(p, _mode(args.mode_a, args.constructors), _mode(args.mode_b, args.constructors),
                      (args.mode_a, args.mode_b), default_step_budget(), cfg)
    except BaselineFailure as e:
        print(f"baseline failure: {e}", file=sys.stderr)
        return EXIT_BASELINE
    _write(args.output, ev.report.to_csv())
    print(ev.report.summary(), end="", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chtest", description="Change-based test selection for MiniOO.")
    sub = ap.add_subparsers(dest="command", required=True)

    def patterns(p):
        p.add_argument("--tests-pattern", help="regex for test method names")
        p.add_argument("--test-class-pattern", help="regex for test class names")

    d = sub.add_parser("distill", help="record the changes between snapshots")
    d.add_argument("dirs", nargs="+", metavar="DIR", help="[oldDir] newDir")
    d.add_argument("--mode", choices=["static", "poly"], default="static")
    d.add_argument("--constructors", action="store_true", help="link constructor invocations")
    d.add_argument("--base", help="existing model of oldDir to extend")
    d.add_argument("-o", "--output", help="model file (default: stdout)")
    patterns(d)
    d.set_defaults(func=cmd_distill)

    s = sub.add_parser("select", help="tests relevant to changes or a class")
    s.add_argument("--model", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--change", type=int, nargs="*", help="change ids")
    g.add_argument("--class", dest="cls", help="select for every method of a class")
    s.add_argument("--json", action="store_true")
    patterns(s)
    s.set_defaults(func=cmd_select)

    m = sub.add_parser("mutate", help="list the mutants of a snapshot")
    m.add_argument("dir")
    patterns(m)
    m.set_defaults(func=cmd_mutate)

    e = sub.add_parser("evaluate", help="compare reduced suites with mutation testing")
    e.add_argument("dir")
    e.add_argument("--mode-a", choices=["static", "poly"], default="static")
    e.add_argument("--mode-b", choices=["static", "poly"], default="poly")
    e.add_argument("--constructors", action="store_true")
    e.add_argument("-o", "--output", help="CSV report (default: stdout)")
    patterns(e)
    e.set_defaults(func=cmd_evaluate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "distill" and len(args.dirs) > 2:
        print("distill takes one or two directories", file=sys.stderr)
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
