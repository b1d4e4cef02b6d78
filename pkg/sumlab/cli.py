"""
Command-line front end.

Usage:
    # run a verification target with the checked-in sweep
    uv run sumlab verify lemma6 --config configs/default.conf

    # override the sweep from the command line and write CSV
    uv run sumlab verify eq4_3 --config configs/default.conf --p 3 --kappa 3..4 --out eq4_3.csv --format csv

    # show the targets and the resolved configuration
    uv run sumlab list --config configs/default.conf
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from sumlab.config import TARGETS, describe, parse_int_list, parse_kappa_range, parse_lambda, resolve_spec
from sumlab.errors import IoFailure, SpecInvalid
from sumlab.lab import run_verify
from sumlab.report import emit_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SPEC_INVALID = 2
EXIT_IO_FAILURE = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="sumlab", description="Verification sweeps for prime-power character sums")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log every tuple (DEBUG level)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Run one verification target")
    verify.add_argument("target", choices=TARGETS, help="Identity or lemma to verify")
    verify.add_argument("-c", "--config", type=Path, help="Sweep configuration file (key = value)")
    verify.add_argument("--p", dest="primes", help="Comma-separated odd primes, e.g. 3,5")
    verify.add_argument("--kappa", help="kappa range a..b or a single value")
    verify.add_argument("--lambda", dest="lam", help="auto or a comma-separated list")
    verify.add_argument("-o", "--out", type=Path, help="Report path (default: <target>.<format>)")
    verify.add_argument("-f", "--format", choices=("csv", "json"), default=None, help="Report format (default: json)")
    verify.add_argument("-j", "--jobs", type=int, help="Worker processes (default: SUMLAB_JOBS or 1)")

    listing = commands.add_parser("list", help="Show the targets and the resolved configuration")
    listing.add_argument("-c", "--config", type=Path, help="Sweep configuration file (key = value)")
    return parser.parse_args(argv)


def _flags(args: argparse.Namespace) -> dict:
    """Command-line overrides as SweepSpec fields."""
    return {
        "primes": parse_int_list("p", args.primes) if args.primes else None,
        "kappas": parse_kappa_range(args.kappa) if args.kappa else None,
        "lambdas": parse_lambda(args.lam) if args.lam else None,
        "jobs": args.jobs,
        "target": args.target,
    }


def _report_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.out is not None and args.out.suffix.lower() == ".csv":
        return "csv"
    return "json"


def cmd_verify(args: argparse.Namespace) -> int:
    flags = _flags(args)
    spec = resolve_spec(args.config, flags)
    if args.lam is not None and args.lam.strip().lower() == "auto":
        spec = replace(spec, lambdas=None)
    fmt = _report_format(args)
    out = args.out or Path(f"{args.target}.{fmt}")

    report = run_verify(args.target, spec)
    emit_report(report, fmt, out)

    summary = report.summary
    if report.passed:
        print(f"✅ {args.target}: {summary.passed}/{summary.total} records passed (max ratio {summary.max_ratio})")
        return EXIT_OK
    print(f"❌ {args.target}: {summary.failed} of {summary.total} records failed ({summary.errors} errors), see {out}")
    return EXIT_FAILED


def cmd_list(args: argparse.Namespace) -> int:
    spec = resolve_spec(args.config)
    print("Targets:")
    for target in TARGETS:
        print(f"  {target}")
    print("Configuration:")
    for line in describe(spec):
        print(f"  {line}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)

    try:
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_list(args)
    except SpecInvalid as e:
        logger.error(f"Invalid sweep specification: {e}")
        return EXIT_SPEC_INVALID
    except IoFailure as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO_FAILURE


if __name__ == "__main__":
    sys.exit(main())
