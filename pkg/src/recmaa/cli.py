"""Command-line front ends.

Three programs are installed:

* ``rec`` checks, normalizes against, and tests rewrite specifications;
* ``maa`` computes file MACs and runs the self-test suites;
* ``crosscheck`` differentially tests the rewrite engine against the native
  implementation.

Exit codes: 0 all passed, 1 check or test failures, 2 usage, input or parse
errors.  Machine-readable reports are JSON lines; field names are documented
in the README.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import maaref
from .analysis import check_all, spec_stats
from .bridge import block_of_term, block_term, mac_call_term
from .corpus import parse_vector_file, read_spec_paths
from .engine import Budget, BudgetExceeded, Engine, Status
from .parser import ParseError, parse_ground_term, parse_spec
from .selftest import run_all
from .terms import Spec, format_term

OK = 0
FAILURES = 1
USAGE = 2

# Sized so the bundled vectors except the 4100-block case fit comfortably;
# that one needs roughly 3.4e6 rewrites and an explicit --budget raise.
DEFAULT_TEST_BUDGET = 2_000_000


def _load_spec(paths: Sequence[str], warnings_sink: Optional[list[str]] = None) -> Spec:
    fragments = read_spec_paths(paths)
    return parse_spec(
        fragments,
        on_warning=warnings_sink.append if warnings_sink is not None else None,
    )


def _budget(args: argparse.Namespace, default_rewrites: int) -> Budget:
    return Budget(
        max_rewrites=getattr(args, "budget", None) or default_rewrites,
        max_depth=getattr(args, "max_depth", None) or Budget().max_depth,
    )


def _write_jsonl(path: str, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


# --- rec ----------------------------------------------------------------------


def _cmd_check(args: argparse.Namespace) -> int:
    parse_warnings: list[str] = []
    try:
        spec = _load_spec(args.files, parse_warnings)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE

    stats = spec_stats(spec)
    diags = check_all(spec)
    errors = [d for d in diags if d.severity == "error"]
    ambiguity = [d for d in diags if d.code == "ambiguous-rules"]
    unused = [d for d in diags if d.code == "unused-variable"]
    other = [
        d for d in diags if d.severity == "warning" and d not in ambiguity + unused
    ]

    for w in parse_warnings:
        print(f"warning: {w}")
    for d in errors + ambiguity + other:
        print(d)
    if args.verbose:
        for d in unused:
            print(d)

    print(f"sorts:             {stats.sorts}")
    print(f"constructors:      {stats.constructors}")
    print(f"defined symbols:   {stats.defined_symbols}")
    print(f"rules:             {stats.rules}")
    print(f"conditional rules: {stats.conditional_rules}")
    print(f"errors:            {len(errors)}")
    print(f"ambiguity warnings: {len(ambiguity)}")
    print(f"parse warnings:     {len(parse_warnings)}")
    print(f"unused-variable warnings: {len(unused)}")

    if errors:
        return FAILURES
    if args.strict and (ambiguity or other or parse_warnings):
        # Unused-variable warnings are exempt: erasing rules are legitimate.
        return FAILURES
    return OK


def _cmd_norm(args: argparse.Namespace) -> int:
    try:
        spec = _load_spec(args.spec)
        term = parse_ground_term(args.expr, spec)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    engine = Engine(spec, backend=args.backend)
    try:
        result = engine.normalize(term, _budget(args, Budget().max_rewrites),
                                  memo=not args.no_memo)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURES
    print(format_term(result.normal_form))
    print(
        f"rule applications: {result.rule_applications}; "
        f"condition evaluations: {result.condition_evaluations}; "
        f"peak term size: {result.peak_term_size}; "
        f"stuck: {'yes' if result.stuck else 'no'}",
        file=sys.stderr,
    )
    return OK


def _run_case(spec: Spec, backend: Optional[str], text: str,
              budget: Budget, memo: bool) -> tuple[str, float, int]:
    start = time.perf_counter()
    term = parse_ground_term(text, spec)
    engine = Engine(spec, backend=backend)  # fresh per case: deterministic stats
    status, apps = engine.eval_bool_result(term, budget, memo)
    millis = (time.perf_counter() - start) * 1000
    return status.value, millis, apps


_POOL_STATE: dict = {}


def _pool_init(paths: Sequence[str], backend: Optional[str]) -> None:
    _POOL_STATE["spec"] = _load_spec(paths)
    _POOL_STATE["backend"] = backend


def _pool_case(job: tuple[str, str, int, int, bool]) -> tuple[str, str, float, int]:
    case_id, text, max_rewrites, max_depth, memo = job
    status, millis, apps = _run_case(
        _POOL_STATE["spec"],
        _POOL_STATE["backend"],
        text,
        Budget(max_rewrites, max_depth),
        memo,
    )
    return case_id, status, millis, apps


def _cmd_test(args: argparse.Namespace) -> int:
    try:
        spec = _load_spec(args.spec)
        if args.vectors == "-":
            cases = parse_vector_file(sys.stdin.read(), spec, source="<stdin>")
        else:
            text = Path(args.vectors).read_text(encoding="utf-8")
            cases = parse_vector_file(text, spec, source=args.vectors)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE

    excluded = set(filter(None, (args.exclude or "").split(",")))
    selected = [(c, t) for c, t in cases if c.id not in excluded]
    budget = _budget(args, DEFAULT_TEST_BUDGET)
    memo = not args.no_memo

    results: dict[str, tuple[str, float, int]] = {}
    wall0 = time.perf_counter()
    if args.jobs > 1:
        import multiprocessing

        jobs = [
            (c.id, c.term, budget.max_rewrites, budget.max_depth, memo)
            for c, _ in selected
        ]
        with multiprocessing.Pool(
            args.jobs, initializer=_pool_init, initargs=(args.spec, args.backend)
        ) as pool:
            for case_id, status, millis, apps in pool.imap_unordered(_pool_case, jobs):
                results[case_id] = (status, millis, apps)
    else:
        for case, _term in selected:
            results[case.id] = _run_case(spec, args.backend, case.term, budget, memo)
    wall = time.perf_counter() - wall0

    counts = {s.value: 0 for s in Status}
    case_records = []
    for case, _term in selected:  # report ordered by input position, id stable
        status, millis, apps = results[case.id]
        counts[status] += 1
        case_records.append(
            {
                "id": case.id,
                "status": status,
                "millis": round(millis, 3),
                "ruleApplications": apps,
            }
        )
        if not args.quiet:
            print(
                f"{case.id:<12} {status:<16} {millis:10.1f} ms "
                f"{apps:>12} rule applications"
            )

    stats = spec_stats(spec)
    print(
        f"{len(selected)} cases: {counts['pass']} pass, {counts['fail']} fail, "
        f"{counts['stuck']} stuck, {counts['budget-exceeded']} budget-exceeded "
        f"({wall:.1f} s)"
    )
    if args.report:
        header = {
            "record": "header",
            "sorts": stats.sorts,
            "constructors": stats.constructors,
            "definedSymbols": stats.defined_symbols,
            "rules": stats.rules,
            "conditionalRules": stats.conditional_rules,
            "cases": len(selected),
        }
        totals = {
            "record": "totals",
            "pass": counts["pass"],
            "fail": counts["fail"],
            "stuck": counts["stuck"],
            "budgetExceeded": counts["budget-exceeded"],
            "millis": round(wall * 1000, 3),
        }
        _write_jsonl(args.report, [header, *[
            {"record": "case", **r} for r in case_records
        ], totals])
    return OK if counts["pass"] == len(selected) else FAILURES


def rec_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rec", description="Rewrite-specification toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and statically check a spec")
    p_check.add_argument("files", nargs="+", help="spec files or directories")
    p_check.add_argument("--strict", action="store_true",
                         help="fail on ambiguity or parse warnings")
    p_check.add_argument("-v", "--verbose", action="store_true",
                         help="also print unused-variable warnings")
    p_check.set_defaults(func=_cmd_check)

    p_norm = sub.add_parser("norm", help="normalize one ground term")
    p_norm.add_argument("spec", nargs="+", help="spec files or directories")
    p_norm.add_argument("-e", "--expr", required=True, help="term to normalize")
    p_norm.add_argument("--budget", type=int, help="max rule applications")
    p_norm.add_argument("--max-depth", type=int, help="max evaluation depth")
    p_norm.add_argument("--no-memo", action="store_true")
    p_norm.add_argument("--backend", choices=("pure", "compiled"))
    p_norm.set_defaults(func=_cmd_norm)

    p_test = sub.add_parser("test", help="evaluate a vector file")
    p_test.add_argument("spec", nargs="+", help="spec files or directories")
    p_test.add_argument("vectors", help="vector file ('-' for stdin)")
    p_test.add_argument("--jobs", type=int, default=1)
    p_test.add_argument("--budget", type=int,
                        help=f"max rule applications per case "
                             f"(default {DEFAULT_TEST_BUDGET})")
    p_test.add_argument("--max-depth", type=int)
    p_test.add_argument("--report", help="write a JSON-lines report here")
    p_test.add_argument("--exclude", help="comma-separated case ids to skip")
    p_test.add_argument("--no-memo", action="store_true")
    p_test.add_argument("--quiet", action="store_true", help="summary only")
    p_test.add_argument("--backend", choices=("pure", "compiled"))
    p_test.set_defaults(func=_cmd_test)

    args = parser.parse_args(argv)
    return args.func(args)


# --- maa ----------------------------------------------------------------------


def _cmd_mac(args: argparse.Namespace) -> int:
    key = args.key.strip()
    if len(key) != 16 or any(c not in "0123456789abcdefABCDEF" for c in key):
        print("error: key must be exactly 16 hex digits", file=sys.stderr)
        return USAGE
    j = int(key[:8], 16)
    k = int(key[8:], 16)
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    try:
        message = maaref.pad_bytes_to_message(data)
        result = maaref.mac((j, k), message, override_size_limit=args.force)
    except maaref.MaaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    print(f"{result:08X}")
    return OK


def _cmd_selftest(args: argparse.Namespace) -> int:
    records = []

    def progress(suite) -> None:
        state = "ok" if suite.ok else f"{len(suite.failures)} FAILURES"
        print(
            f"{suite.name:<24} {suite.checks:>8} checks  "
            f"{suite.millis:10.0f} ms  {state}"
        )
        for failure in suite.failures[:20]:
            print(f"  failed: {failure}")
        if len(suite.failures) > 20:
            print(f"  ... and {len(suite.failures) - 20} more")
        records.append(
            {
                "record": "suite",
                "name": suite.name,
                "checks": suite.checks,
                "failures": len(suite.failures),
                "millis": round(suite.millis, 3),
            }
        )

    suites = run_all(backend=args.backend, progress=progress)
    total_checks = sum(s.checks for s in suites)
    total_failures = sum(len(s.failures) for s in suites)
    print(f"total: {total_checks} checks, {total_failures} failures")
    if args.report:
        _write_jsonl(
            args.report,
            records
            + [
                {
                    "record": "totals",
                    "checks": total_checks,
                    "failures": total_failures,
                }
            ],
        )
    return OK if total_failures == 0 else FAILURES


def maa_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="maa", description="Message Authenticator Algorithm tools."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_mac = sub.add_parser("mac", help="compute the MAC of a file")
    p_mac.add_argument("--key", required=True,
                       help="16 hex digits, J first (big-endian)")
    p_mac.add_argument("file", help="input file (bytes, padded with nulls)")
    p_mac.add_argument("--force", action="store_true",
                       help="override the 1,000,000-block size limit")
    p_mac.set_defaults(func=_cmd_mac)

    p_self = sub.add_parser("selftest", help="run the built-in validation suites")
    p_self.add_argument("--report", help="write a JSON-lines report here")
    p_self.add_argument("--backend", choices=("pure", "compiled"))
    p_self.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


# --- crosscheck -----------------------------------------------------------------


def crosscheck_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="crosscheck",
        description="Differential testing: rewrite engine vs native reference.",
    )
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--cases", type=int, default=100)
    parser.add_argument("--max-blocks", type=int, default=8)
    parser.add_argument("--budget", type=int)
    parser.add_argument("--backend", choices=("pure", "compiled"))
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--inject-fault", action="store_true",
                        help="corrupt the native result to exercise mismatch "
                             "reporting")
    args = parser.parse_args(argv)

    import random

    from .corpus import corpus_spec

    spec = corpus_spec()
    engine = Engine(spec, backend=args.backend)
    budget = Budget(max_rewrites=args.budget or Budget().max_rewrites)
    rng = random.Random(args.seed)
    mismatches = 0
    for index in range(1, args.cases + 1):
        j = rng.getrandbits(32)
        k = rng.getrandbits(32)
        blocks = [rng.getrandbits(32) for _ in range(rng.randint(1, args.max_blocks))]
        native = maaref.mac((j, k), blocks)
        if args.inject_fault:
            native ^= 1
        term = mac_call_term(spec, j, k, blocks)
        try:
            result = engine.normalize(term, budget)
        except BudgetExceeded as exc:
            print(f"case {index:03d}: BUDGET EXCEEDED ({exc})", file=sys.stderr)
            mismatches += 1
            continue
        expected = block_term(spec, native)
        if result.normal_form == expected:
            if not args.quiet:
                print(f"case {index:03d}: ok ({len(blocks)} blocks)")
            continue
        mismatches += 1
        print(f"case {index:03d}: MISMATCH", file=sys.stderr)
        print(f"  term: {format_term(term)}", file=sys.stderr)
        print(f"  native: {native:08X}", file=sys.stderr)
        try:
            engine_value = f"{block_of_term(result.normal_form):08X}"
        except ValueError:
            engine_value = format_term(result.normal_form, max_len=200)
        print(f"  engine: {engine_value}", file=sys.stderr)
        pre = maaref.prelude((j, k))
        print(f"  prelude: {tuple(hex(x) for x in pre)}", file=sys.stderr)
        state = maaref.LoopState(pre.x0, pre.y0, pre.v0)
        for step, block in enumerate([*blocks, pre.s, pre.t], start=1):
            state = maaref.main_loop_step(state, pre.w, block)
            print(
                f"  step {step}: block={block:08X} "
                f"x={state.x:08X} y={state.y:08X} v={state.v:08X}",
                file=sys.stderr,
            )
    print(f"{args.cases} cases, {mismatches} mismatches")
    return OK if mismatches == 0 else FAILURES


if __name__ == "__main__":  # pragma: no cover
    sys.exit(rec_main())
