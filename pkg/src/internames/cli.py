"""Command line front end: run scenarios, diff traces, apply migrations.

Exit status: 0 success, 1 trace mismatch, 2 parse or validation error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import InternamesError, InvalidStep, ParseError, ValidationError
from .scenario import (
    BUILTIN_NAMES,
    _SCENARIO_FILES,
    apply_migration,
    diff_trace,
    golden_trace,
    load_builtin,
    load_plan,
    load_scenario,
    run_scenario,
    save_scenario,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2


def _resolve_scenario(arg: str):
    if arg in BUILTIN_NAMES or arg in _SCENARIO_FILES:
        return load_builtin(arg)
    return load_scenario(arg)


def _golden_path_for(name: str) -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(here, "scenarios", f"{name}.golden")


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    result = run_scenario(scenario, until_tick=args.until)
    text = result.trace_text + "\n"
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.bless:
        # Freezing a golden is always explicit; it is never rewritten as a
        # side effect of an ordinary run.
        path = _golden_path_for(scenario.name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"blessed golden trace: {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_diff(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    result = run_scenario(scenario)
    if os.path.exists(args.golden):
        with open(args.golden, encoding="utf-8") as fh:
            golden = fh.read()
    else:
        golden = golden_trace(args.golden)
    status, message = diff_trace(result.trace_text + "\n", golden)
    print(message)
    return EXIT_OK if status == 0 else EXIT_MISMATCH


def _cmd_migrate(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    plan = load_plan(args.plan)
    migrated = apply_migration(scenario, plan)
    text = save_scenario(migrated)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_list_builtin(_args) -> int:
    for name in BUILTIN_NAMES:
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="internames",
        description="deterministic name-to-name internetworking simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and emit its trace")
    p_run.add_argument("scenario", help="scenario file path or builtin name")
    p_run.add_argument("--until", type=int, default=None, help="stop after this tick")
    p_run.add_argument("--trace", default=None, help="write the trace to this file")
    p_run.add_argument("--bless", action="store_true",
                       help="freeze the produced trace as the scenario's golden file")
    p_run.set_defaults(fn=_cmd_run)

    p_diff = sub.add_parser("diff", help="run a scenario and compare against a golden trace")
    p_diff.add_argument("scenario", help="scenario file path or builtin name")
    p_diff.add_argument("golden", help="golden trace file path or builtin name")
    p_diff.set_defaults(fn=_cmd_diff)

    p_mig = sub.add_parser("migrate", help="apply a migration plan to a scenario")
    p_mig.add_argument("scenario", help="scenario file path or builtin name")
    p_mig.add_argument("plan", help="migration plan file")
    p_mig.add_argument("--out", default=None, help="write the migrated scenario here")
    p_mig.set_defaults(fn=_cmd_migrate)

    p_list = sub.add_parser("list-builtin", help="list builtin scenario names")
    p_list.set_defaults(fn=_cmd_list_builtin)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValidationError, InvalidStep) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InternamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
