"""Command-line front end for the certificate reports.

Three subcommands produce JSON (or flattened CSV) reports:

``example-a``
    Distance table and excluding slice for the first grid family.
``example-b``
    Adjacent-pair distances and sampled supporting slices for the
    second grid family.
``verify``
    The module property suites (``metric``, ``freespace``, ``rtree``,
    ``absnorm``, ``dyadic``, or ``all``), optionally extended with
    checks of a user-supplied metric space (``--space FILE``) or
    absolute plane norm (``--norm FILE``).  Input schemas are
    documented in the README.

Exit codes: 0 when every check passes, 1 when a mathematical check
fails, 2 on input or configuration errors.  Reports are deterministic
functions of the command line, so reruns serialize byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import absnorm as an
from . import metric as me
from . import suites as su

EXIT_PASS = 0
EXIT_MATH_FAILURE = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicecert",
        description="Exact-rational certificate reports for slice geometry "
        "in Lipschitz-free spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    pa = sub.add_parser(
        "example-a",
        help="distance table and excluding slice for the first grid family",
    )
    pa.add_argument("--level", type=int, default=3, help="truncation level (1..6)")
    _add_output_flags(pa)

    pb = sub.add_parser(
        "example-b",
        help="adjacent pairs and sampled supporting slices for the second "
        "grid family",
    )
    pb.add_argument("--level", type=int, default=4, help="truncation level (2..6)")
    pb.add_argument(
        "--samples", type=int, default=20, help="number of sampled slices"
    )
    pb.add_argument("--seed", type=int, default=0, help="random seed")
    _add_output_flags(pb)

    pv = sub.add_parser("verify", help="run the module property suites")
    pv.add_argument(
        "suites",
        nargs="*",
        default=["all"],
        metavar="suite",
        help="metric, freespace, rtree, absnorm, dyadic, or all (default)",
    )
    pv.add_argument("--seed", type=int, default=0, help="random seed")
    pv.add_argument(
        "--samples",
        type=int,
        default=None,
        help="override the per-suite sample budgets",
    )
    pv.add_argument(
        "--depth",
        type=int,
        default=None,
        help="random span depth for the dyadic suite (1..8, default 5)",
    )
    pv.add_argument(
        "--space",
        metavar="FILE",
        default=None,
        help="also check the finite metric space in this JSON file",
    )
    pv.add_argument(
        "--norm",
        metavar="FILE",
        default=None,
        help="also check the absolute plane norm in this JSON file",
    )
    _add_output_flags(pv)

    return parser


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="report format (default json)",
    )
    parser.add_argument(
        "--out",
        metavar="PATH",
        default=None,
        help="write the report to this file instead of stdout",
    )


def _load_json(path: str) -> object:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _build_report(args: argparse.Namespace) -> dict:
    if args.command == "example-a":
        return su.example_a_report(args.level)
    if args.command == "example-b":
        return su.example_b_report(args.level, samples=args.samples, seed=args.seed)

    if args.samples is not None and args.samples < 1:
        raise ValueError("samples must be a positive count")
    names = list(args.suites)
    if not names or "all" in names:
        names = list(su.SUITE_ORDER)
    # Parse the input files before spending time on the suites, so a bad
    # document fails fast; axiom checks still run after the suites.
    space = None if args.space is None else me.space_from_json(_load_json(args.space))
    norm = None if args.norm is None else an.norm_from_json(_load_json(args.norm))
    report = su.run_suites(
        names, seed=args.seed, samples=args.samples, depth=args.depth
    )
    if space is not None:
        report["space_check"] = su.space_report(space)
    if norm is not None:
        report["norm_check"] = su.norm_report(norm)
    extras = [report.get("space_check"), report.get("norm_check")]
    report["ok"] = report["ok"] and all(r["ok"] for r in extras if r is not None)
    return report


def _flatten(value: object, prefix: str, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(value[key], f"{prefix}.{key}" if prefix else str(key), rows)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(item, f"{prefix}[{i}]", rows)
    elif value is None:
        rows.append((prefix, ""))
    elif isinstance(value, bool):
        rows.append((prefix, "true" if value else "false"))
    else:
        rows.append((prefix, str(value)))


def render_report(report: dict, fmt: str) -> str:
    """Serialize a report deterministically as JSON or flattened CSV."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows: list[tuple[str, str]] = []
    _flatten(report, "", rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = _build_report(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    text = render_report(report, args.format)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_PASS if report["ok"] else EXIT_MATH_FAILURE


if __name__ == "__main__":
    sys.exit(main())
