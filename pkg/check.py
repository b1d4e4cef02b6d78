#!/usr/bin/env python3
"""
Lint, test and run every verification target of sumlab, then print one line per step.
"""

import argparse
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

WORKSPACE_ROOT = Path(__file__).parent
CONFIGS = {"default": "configs/default.conf", "acceptance": "configs/acceptance.conf"}
REPORT_DIR = Path(os.environ.get("SUMLAB_REPORT_DIR", WORKSPACE_ROOT / "reports"))

TARGETS = [
    "circle",
    "eq4_3",
    "cstar_split",
    "lemma5",
    "lemma6",
    "lemma7",
    "quintic",
    "oscillatory_bounds",
]

# exit codes of `sumlab verify`
VERIFY_EXITS = {0: "passed", 1: "failing records", 2: "invalid sweep spec", 3: "report i/o failure"}


@dataclass
class Step:
    name: str
    cmd: list[str]
    report: Optional[Path] = None
    returncode: Optional[int] = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.returncode == 0

    def outcome(self) -> str:
        if self.returncode is None:
            return "not run"
        if self.report is not None:
            return VERIFY_EXITS.get(self.returncode, f"exit {self.returncode}")
        return "passed" if self.ok else f"exit {self.returncode}"


def run_step(step: Step) -> Step:
    print(f"\n--- {step.name}: {' '.join(step.cmd)}", flush=True)
    start = time.monotonic()
    try:
        step.returncode = subprocess.run(step.cmd, cwd=WORKSPACE_ROOT).returncode
    except OSError as e:
        print(f"cannot start {step.cmd[0]}: {e}")
        step.returncode = 127
    step.seconds = time.monotonic() - start
    return step


def lint_step() -> Step:
    return Step("ruff", ["uv", "run", "ruff", "check", "sumlab", "tests", "tools", "check.py"])


def test_step(include_slow: bool) -> Step:
    cmd = ["uv", "run", "pytest"]
    if not include_slow:
        cmd += ["-m", "not slow"]
    return Step("pytest", cmd)


def verify_step(target: str, config: Path, jobs: Optional[int], fmt: str) -> Step:
    report = REPORT_DIR / f"{target}.{fmt}"
    cmd = ["uv", "run", "sumlab", "verify", target, "--config", str(config), "--out", str(report), "--format", fmt]
    if jobs:
        cmd += ["--jobs", str(jobs)]
    return Step(target, cmd, report)


def print_summary(steps: list[Step]):
    print(f"\n{'step':<20} {'result':<20} {'time':>8}  report")
    for step in steps:
        report = "" if step.report is None or not step.report.exists() else str(step.report)
        print(f"{step.name:<20} {step.outcome():<20} {step.seconds:>7.1f}s  {report}")


def main() -> int:
    parser = argparse.ArgumentParser(description="Lint, test and verify sumlab")
    parser.add_argument("-c", "--config", help=f"Sweep config (default: {CONFIGS['default']})")
    parser.add_argument("--acceptance", action="store_true", help=f"Use {CONFIGS['acceptance']}")
    parser.add_argument("-t", "--target", action="append", choices=TARGETS, help="Target to verify (repeatable)")
    parser.add_argument("-j", "--jobs", type=int, help="Worker processes for the sweeps")
    parser.add_argument("--format", default="json", choices=["json", "csv"], help="Report format (default: json)")
    parser.add_argument("--slow", action="store_true", help="Include tests marked slow")
    parser.add_argument("--skip-lint", action="store_true", help="Don't run ruff")
    parser.add_argument("--skip-tests", action="store_true", help="Don't run pytest")
    parser.add_argument("--verify-only", action="store_true", help="Only run the verification targets")
    args = parser.parse_args()

    config = WORKSPACE_ROOT / (args.config or CONFIGS["acceptance" if args.acceptance else "default"])
    if not config.exists():
        print(f"❌ Config file not found: {config}")
        return 1
    REPORT_DIR.mkdir(parents=True, exist_ok=True)

    steps = []
    if not args.verify_only:
        if not args.skip_lint:
            steps.append(lint_step())
        if not args.skip_tests:
            steps.append(test_step(args.slow))
    steps += [verify_step(target, config, args.jobs, args.format) for target in args.target or TARGETS]

    for step in steps:
        run_step(step)
        # stop after a failed lint or test run
        if step.report is None and not step.ok:
            break

    print_summary(steps)
    if all(step.ok for step in steps):
        print(f"\n✅ All steps passed with {config.name}")
        return 0
    print(f"\n❌ {sum(not step.ok for step in steps)} step(s) did not pass")
    return 1


if __name__ == "__main__":
    sys.exit(main())
