"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 I/O failure or usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import io as nio
from .domain import SCENARIO_ORDER
from .pipeline import PipelineError, load_dataset, dataset_violations, run_pipeline
from .psi import HYPERSCALE_SHARE, IEA_GLOBAL_DC_2030_TWH, TOP_FIRM_SHARE, cross_validate_global

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nexusgrid",
        description="Data-center electricity scenarios, regional allocation and grid stress.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="run configuration (TOML)")
    common.add_argument("--scenario", choices=SCENARIO_ORDER, action="append",
                        help="restrict to scenario (repeatable)")
    common.add_argument("--year", type=int, help="restrict year-indexed rows; sets PSI year")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output directory (NEXUS_OUT_DIR takes precedence)")

    sub.add_parser("validate", parents=[common], help="dataset checks only")
    sub.add_parser("forecast", parents=[common], help="firm trajectories and global ensemble")
    sub.add_parser("allocate", parents=[common], help="forecast plus regional demand")
    sub.add_parser("psi", parents=[common], help="allocate plus PSI report and validation")

    cc = sub.add_parser("crosscheck", help="implied six-firm benchmark from a global forecast")
    cc.add_argument("--global-twh", type=float, default=IEA_GLOBAL_DC_2030_TWH)
    cc.add_argument("--hyperscale-share", type=float, default=HYPERSCALE_SHARE)
    cc.add_argument("--top-firm-share", type=float, default=TOP_FIRM_SHARE)
    cc.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _crosscheck(args) -> int:
    try:
        value = cross_validate_global(args.global_twh, args.hyperscale_share, args.top_firm_share)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "json":
        print(json.dumps({"implied_six_firm_twh": float(nio.fmt(value))}))
    else:
        print(nio.fmt(value))
    return EXIT_OK


def _validate(config) -> int:
    ds = load_dataset(config)
    problems = dataset_violations(config, ds)
    for v in problems:
        print(v)
    if problems:
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "crosscheck":
        return _crosscheck(args)

    try:
        config = nio.load_config(args.config)
        if args.command == "validate":
            return _validate(config)
        out = nio.resolve_out_dir(args.out, config)
        art = run_pipeline(config, stage=args.command, out_dir=out, formats=(args.format,),
                           scenarios=args.scenario, year=args.year)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if exc.io_failure else EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for path in art.written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
