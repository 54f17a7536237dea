"""Command-line front end.

Subcommands: ``check`` (explore one program file and report), ``verify``
(cross-check the algorithms against the brute-force oracle, on one file or on
a seeded random corpus), ``bench`` (run a named benchmark and compare the
result to its expected count), and ``dump-tree`` (emit the exploration tree
as DOT).

Exit codes: 0 success, 1 violation found (assertion failure, invariant
failure, or a failed verification), 2 usage error, 3 parse error, 4 limit
exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

from .bench import bench_spec, gen_random
from .explorer import (
    ExploreConfig,
    InvariantViolation,
    LimitExceeded,
    Report,
    brute_force_classes,
    explore,
    verify_optimality,
)
from .model import ParseError, ProgramError

_ALG_CHOICES = ("pop", "pop-explicit", "pop-explicit-sleep", "brute", "brute-force")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_LIMIT = 4


def _setup_logging() -> None:
    level_name = os.environ.get("POP_SMC_LOG", "").strip()
    if not level_name:
        return
    level = getattr(logging, level_name.upper(), None)
    if not isinstance(level, int):
        level = logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger = logging.getLogger("pop_smc")
    logger.addHandler(handler)
    logger.setLevel(level)


def _read_program(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _print_witness(lines: list[str], indent: str = "    ") -> None:
    for i, entry in enumerate(lines, 1):
        locus, _, stmt = entry.partition(":")
        thread, _, step = locus.partition(".")
        print(f"{indent}{i}. thread {thread} step {step}: {stmt}")


def _print_report(report: Report) -> None:
    print(f"algorithm           {report.algorithm}")
    print(f"executions          {report.executions}")
    print(f"distinct traces     {report.distinct_traces}")
    print(f"blocked reversals   {report.blocked_reversals}")
    print(f"max reversal depth  {report.max_reversal_depth}")
    print(f"max sschar size     {report.max_sschar_size}")
    print(f"wall ms             {report.wall_ms:.1f}")
    if report.limit_exceeded:
        print(f"limit exceeded      {report.limit_exceeded}")
    for v in report.assertion_violations:
        print(f"assertion violation: {v['message']}")
        print("  witness:")
        _print_witness(v["witness"])


def _emit_report(report: Report, as_json: bool, extra: dict | None = None) -> None:
    if as_json:
        doc = report.to_dict()
        if extra:
            doc = {**extra, **doc}
        print(json.dumps(doc, indent=2))
    else:
        if extra:
            for k, v in extra.items():
                print(f"{k:<19} {v}")
        _print_report(report)


def _config_from_args(args: argparse.Namespace, **overrides) -> ExploreConfig:
    kwargs = {
        "algorithm": getattr(args, "algorithm", "pop"),
        "invariants": getattr(args, "invariants", 1),
        "max_execs": getattr(args, "max_execs", None),
        "max_seconds": getattr(args, "max_seconds", None),
        "dot": getattr(args, "dot", None),
    }
    kwargs.update(overrides)
    return ExploreConfig(**kwargs)


# ---- subcommands -----------------------------------------------------------------


def _cmd_check(args: argparse.Namespace) -> int:
    text = _read_program(args.file)
    try:
        report = explore(text, _config_from_args(args))
    except LimitExceeded as exc:
        _emit_report(exc.report, args.json)
        return EXIT_LIMIT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        if exc.prefix:
            print("repro prefix:", file=sys.stderr)
            for line in exc.prefix:
                print(f"  {line}", file=sys.stderr)
        return EXIT_VIOLATION
    _emit_report(report, args.json)
    return EXIT_VIOLATION if report.assertion_violations else EXIT_OK


def _verdict_to_json(verdict: dict) -> dict:
    return {k: v for k, v in verdict.items() if k != "reports"}


def _cmd_verify(args: argparse.Namespace) -> int:
    kwargs = {
        "max_execs": args.max_execs,
        "max_seconds": args.max_seconds,
        "invariants": args.invariants,
    }
    if args.file is not None:
        text = _read_program(args.file)
        try:
            verdict = verify_optimality(text, **kwargs)
        except LimitExceeded as exc:
            print(f"limit exceeded: {exc.reason}", file=sys.stderr)
            return EXIT_LIMIT
        if args.json:
            print(json.dumps(_verdict_to_json(verdict), indent=2))
        else:
            print(f"classes             {verdict['classes']}")
            print(f"pop executions      {verdict['pop_executions']}")
            print(f"explicit executions {verdict['pop_explicit_executions']}")
            for failure in verdict["failures"]:
                print(f"FAIL {json.dumps(failure)}")
            print("verdict: " + ("ok" if verdict["ok"] else "FAILED"))
        return EXIT_OK if verdict["ok"] else EXIT_VIOLATION
    results = []
    failed = 0
    for seed in range(args.seeds):
        program = gen_random(seed, max_threads=args.max_threads)
        try:
            verdict = verify_optimality(program, **kwargs)
        except LimitExceeded as exc:
            print(f"seed {seed}: limit exceeded: {exc.reason}", file=sys.stderr)
            return EXIT_LIMIT
        if not verdict["ok"]:
            failed += 1
            results.append({"seed": seed, **_verdict_to_json(verdict)})
            if not args.json:
                print(f"seed {seed}: FAILED")
                for failure in verdict["failures"]:
                    print(f"  {json.dumps(failure)}")
                print("  program:")
                for line in program.source.rstrip().splitlines():
                    print(f"    {line}")
    if args.json:
        print(json.dumps({"seeds": args.seeds, "failed": failed, "failures": results}, indent=2))
    else:
        print(f"{args.seeds} seeds verified, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_VIOLATION


def _cmd_bench(args: argparse.Namespace) -> int:
    try:
        spec = bench_spec(args.name, tuple(args.params))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    program = spec.program()
    try:
        report = explore(program, _config_from_args(args))
    except LimitExceeded as exc:
        _emit_report(exc.report, args.json)
        return EXIT_LIMIT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    expected = spec.expected_executions
    if expected is None:
        expected = len(brute_force_classes(program, max_seconds=args.max_seconds))
    ok = report.executions == expected and report.distinct_traces == expected
    name = spec.name if not spec.params else f"{spec.name}({','.join(map(str, spec.params))})"
    _emit_report(report, args.json, extra={"bench": name, "expected": expected})
    if not args.json:
        print("verdict: " + ("ok" if ok else "MISMATCH"))
    return EXIT_OK if ok else EXIT_VIOLATION


def _cmd_dump_tree(args: argparse.Namespace) -> int:
    text = _read_program(args.file)
    if args.dot is not None:
        try:
            explore(text, _config_from_args(args))
        except LimitExceeded:
            return EXIT_LIMIT
        return EXIT_OK
    with tempfile.NamedTemporaryFile("r", suffix=".dot", delete=False) as tmp:
        path = tmp.name
    try:
        explore(text, _config_from_args(args, dot=path))
        with open(path, "r", encoding="utf-8") as fh:
            sys.stdout.write(fh.read())
    except LimitExceeded:
        return EXIT_LIMIT
    finally:
        os.unlink(path)
    return EXIT_OK


# ---- argument parsing --------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, algorithm: bool = True) -> None:
    if algorithm:
        p.add_argument("--algorithm", choices=_ALG_CHOICES, default="pop", help="exploration algorithm")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--max-execs", type=int, default=None, metavar="K", help="stop after K executions")
    p.add_argument("--max-seconds", type=float, default=None, metavar="S", help="stop after S seconds")
    p.add_argument("--invariants", type=int, choices=(0, 1, 2), default=1, help="runtime invariant level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pop-smc", description="Stateless model checker for a small shared-memory language.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="explore one program and report")
    p_check.add_argument("file", help="program file")
    _add_common(p_check)
    p_check.add_argument("--dot", metavar="FILE", default=None, help="also write the exploration tree as DOT")
    p_check.set_defaults(func=_cmd_check)

    p_verify = sub.add_parser("verify", help="cross-check algorithms against the brute-force oracle")
    p_verify.add_argument("file", nargs="?", default=None, help="program file (omit to run the random corpus)")
    p_verify.add_argument("--seeds", type=int, default=100, metavar="K", help="number of random programs")
    p_verify.add_argument("--max-threads", type=int, default=4, metavar="T", help="random-program thread cap")
    p_verify.add_argument("--json", action="store_true", help="emit the verdict as JSON")
    p_verify.add_argument("--max-execs", type=int, default=None, metavar="K")
    p_verify.add_argument("--max-seconds", type=float, default=None, metavar="S")
    p_verify.add_argument("--invariants", type=int, choices=(0, 1, 2), default=1)
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run a named benchmark and compare to its expected count")
    p_bench.add_argument("name", help="benchmark name (fig1, exp-mem3, length-param, lastzero)")
    p_bench.add_argument("params", nargs="*", type=int, help="benchmark parameters")
    _add_common(p_bench)
    p_bench.add_argument("--dot", metavar="FILE", default=None)
    p_bench.set_defaults(func=_cmd_bench)

    p_dump = sub.add_parser("dump-tree", help="emit the exploration tree as DOT")
    p_dump.add_argument("file", help="program file")
    p_dump.add_argument("--algorithm", choices=("pop", "pop-explicit", "pop-explicit-sleep"), default="pop")
    p_dump.add_argument("--dot", metavar="FILE", default=None, help="write DOT here instead of stdout")
    p_dump.add_argument("--max-execs", type=int, default=None, metavar="K")
    p_dump.add_argument("--max-seconds", type=float, default=None, metavar="S")
    p_dump.add_argument("--invariants", type=int, choices=(0, 1, 2), default=1)
    p_dump.set_defaults(func=_cmd_dump_tree)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, ProgramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
