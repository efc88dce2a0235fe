"""Command line surface: instance generation, file verification, and the
seeded acceptance suite.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .checks import BASIC_GROUPS, CHECK_GROUPS, FULL_GROUPS, Tolerances
from .errors import ConfigInvalidError, ParseError
from .generator import GeneratorConfig, gen_instance, rotation_config
from .instance_io import parse_instance, serialize_instance
from .suite import run_suite

_MODES = ("measurable_u", "partial_isometry", "zero_blocks", "constant_u",
          "point_map")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcelab",
        description="Verify closed-form decompositions of weighted "
                    "conditional-expectation operators against dense "
                    "linear-algebra oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded instance file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--n", type=int, default=8, help="point count (2..64)")
    gen.add_argument("--blocks", type=int, default=3, help="partition block count")
    gen.add_argument("--mode", action="append", choices=_MODES, default=[],
                     help="special generation mode; repeatable")
    gen.add_argument("-o", "--output", type=Path, default=None,
                     help="output file (default: stdout)")

    verify = sub.add_parser("verify", help="run checks over instance files")
    verify.add_argument("files", nargs="+", type=Path)
    verify.add_argument("--checks", default=None,
                        help="comma-separated check groups "
                             f"(default: all; known: {','.join(CHECK_GROUPS)})")
    verify.add_argument("--tol", type=float, default=1e-8,
                        help="relative operator comparison tolerance")
    verify.add_argument("--support-tol", type=float, default=1e-10,
                        help="support / zero detection tolerance")
    verify.add_argument("--report", type=Path, default=None,
                        help="write the machine-readable JSON report here")

    suite = sub.add_parser("suite", help="run the seeded verification suite")
    suite.add_argument("--seeds", default="1..200",
                       help="inclusive seed range A..B (default 1..200)")
    suite.add_argument("--full", action="store_true",
                       help="include the spectral checks and point maps")
    suite.add_argument("--tol", type=float, default=1e-8)
    suite.add_argument("--support-tol", type=float, default=1e-10)
    suite.add_argument("--report", type=Path, default=None)
    return parser


def _parse_seed_range(text: str) -> range:
    sep = ".." if ".." in text else None
    if sep is None:
        raise ValueError(f"seed range must look like A..B, got {text!r}")
    lo_text, hi_text = text.split(sep, 1)
    lo, hi = int(lo_text), int(hi_text)
    if hi < lo:
        raise ValueError(f"empty seed range {text!r}")
    return range(lo, hi + 1)


def _emit(report, report_path: Path | None, wall: float) -> int:
    print(report.render_text(wall))
    if report_path is not None:
        report_path.write_text(report.to_json())
    return 0 if report.all_passed else 1


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = GeneratorConfig(
        seed=args.seed,
        n=args.n,
        block_count=args.blocks,
        measurable_u="measurable_u" in args.mode,
        partial_isometry="partial_isometry" in args.mode,
        zero_blocks="zero_blocks" in args.mode,
        constant_u="constant_u" in args.mode,
        with_point_map="point_map" in args.mode,
    )
    try:
        doc = serialize_instance(gen_instance(cfg))
    except ConfigInvalidError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.output is None:
        print(doc)
    else:
        args.output.write_text(doc + "\n")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    bundles = []
    for path in args.files:
        try:
            bundles.append(parse_instance(path.read_text()))
        except OSError as e:
            print(f"error: cannot read {path}: {e}", file=sys.stderr)
            return 2
        except ParseError as e:
            print(f"error: {path}: {e}", file=sys.stderr)
            return 2
    checks = None if args.checks is None else args.checks.split(",")
    tols = Tolerances.scaled(args.tol, args.support_tol)
    start = time.perf_counter()
    try:
        report = run_suite(bundles, checks, tols)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return _emit(report, args.report, time.perf_counter() - start)


def _cmd_suite(args: argparse.Namespace) -> int:
    try:
        seeds = _parse_seed_range(args.seeds)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    bundles = [gen_instance(rotation_config(s, with_point_map=args.full))
               for s in seeds]
    groups = FULL_GROUPS if args.full else BASIC_GROUPS
    tols = Tolerances.scaled(args.tol, args.support_tol)
    start = time.perf_counter()
    report = run_suite(bundles, groups, tols)
    return _emit(report, args.report, time.perf_counter() - start)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"gen": _cmd_gen, "verify": _cmd_verify, "suite": _cmd_suite}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
