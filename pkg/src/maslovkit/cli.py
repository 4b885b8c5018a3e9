"""Command-line front end.

    maslovkit maslov scenario.json [--out report.json]
    maslovkit suite [DIR] [--out reports/] [--jobs 4]

Each kind subcommand reads one scenario file (or ``-`` for stdin); the kind
on the command line must match the file, or is filled in when the file
omits it. Exit codes: 0 ok, 1 failed checks, 2 invalid input, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import re
import sys

from . import scenarios
from .errors import ValidationError


def _read(source: str):
    try:
        if source == "-":
            return json.load(sys.stdin)
        return scenarios.load_scenario(source)
    except OSError as exc:
        raise ValidationError(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"stdin is not valid JSON ({exc})") from None


def _summary_line(report) -> str:
    keys = ("index", "pairing", "cocycle", "periods", "indices_gauss",
            "indices_hormander", "in_lh", "verdict", "criterion_title")
    shown = ", ".join(f"{k}={report[k]}" for k in keys if k in report)
    return f"{report['kind']}: {report['status'].upper()}" + (f"  {shown}" if shown else "")


def _print_report(report, code):
    print(_summary_line(report))
    for name, ok in sorted(report.get("checks", {}).items()):
        print(f"  {'PASS' if ok else 'FAIL'}  {name}")
    if report.get("error"):
        print(f"  error: {report['error']['name']}: {report['error']['message']}")
    print(f"  exit code {code}, {report['timing']['wall_seconds']:.3f} s")


def _run_one(kind, args) -> int:
    try:
        scenario = _read(args.scenario)
    except ValidationError as exc:
        print(f"{kind}: VALIDATION_ERROR  {exc}", file=sys.stderr)
        return scenarios.EXIT_VALIDATION
    if isinstance(scenario, dict):
        scenario.setdefault("kind", kind)
        if scenario["kind"] != kind:
            print(f"{kind}: VALIDATION_ERROR  scenario kind is {scenario['kind']!r}",
                  file=sys.stderr)
            return scenarios.EXIT_VALIDATION
    report, code = scenarios.run_scenario(scenario, args.tolerance_scale, args.seed)
    out = args.out or (scenario.get("output_path") if isinstance(scenario, dict) else None)
    if out:
        path = pathlib.Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(scenarios.dumps(report))
    _print_report(report, code)
    return code


def _natural(key: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", key)]


def _run_suite(args) -> int:
    directory = args.directory or scenarios.shipped_suite_dir()
    try:
        summary, code = scenarios.run_suite(directory, args.out, args.jobs,
                                            args.tolerance_scale, args.seed)
    except ValidationError as exc:
        print(f"suite: VALIDATION_ERROR  {exc}", file=sys.stderr)
        return scenarios.EXIT_VALIDATION
    print(f"suite {summary['directory']}: {summary['scenarios']} scenario(s)")
    for key, row in sorted(summary["table"].items(), key=lambda kv: _natural(kv[0])):
        files = ", ".join(f"{s['file']}[{s['exit_code']}]" for s in row["scenarios"])
        print(f"  {'PASS' if row['passed'] else 'FAIL'}  {key:<8} {files}")
    print("ALL PASS" if summary["passed"] else "SOME FAILED")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    common.add_argument("--out", default=None,
                        help="report file (kind commands) or report directory (suite)")
    common.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply every numerical tolerance by this factor")

    parser = argparse.ArgumentParser(prog="maslovkit",
                                     description="Maslov index, Hörmander index and "
                                                 "Lagrangian surface checks from JSON scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in scenarios.KINDS[:-1]:
        p = sub.add_parser(kind, parents=[common], help=f"run one {kind} scenario")
        p.add_argument("scenario", help="scenario JSON file, or - for stdin")
    p = sub.add_parser("suite", parents=[common], help="run a directory of scenarios")
    p.add_argument("directory", nargs="?", default=None,
                   help="scenario directory (default: the shipped acceptance suite)")
    p.add_argument("--jobs", type=int, default=1, help="parallel scenario count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "suite":
        return _run_suite(args)
    return _run_one(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
