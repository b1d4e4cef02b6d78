"""
Verification results: per-claim outcomes, per-tuple records and the report they roll up into.

Reports are written as CSV (flat record table) or JSON (records, claims, summary and an
isolated run block holding the timestamp and wall time).
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

from sumlab.errors import IoFailure
from sumlab.values import SumValue

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "target",
    "p",
    "kappa",
    "lambda",
    "r_or_s",
    "q1",
    "q2",
    "m1",
    "m2",
    "n1p",
    "n1pp",
    "n2",
    "oracle_re",
    "oracle_im",
    "fast_re",
    "fast_im",
    "bound",
    "ratio",
    "pass",
)

PARAMETER_COLUMNS = CSV_COLUMNS[1:12]


@dataclass
class Claim:
    """One checked statement about a tuple. Non-gating claims are recorded but never fail a record."""

    name: str
    passed: bool
    gating: bool = True
    value: Optional[float] = None
    bound: Optional[float] = None

    def __post_init__(self):
        self.passed = bool(self.passed)
        if self.value is not None:
            self.value = float(self.value)
        if self.bound is not None:
            self.bound = float(self.bound)

    @property
    def ratio(self) -> Optional[float]:
        if self.value is None or not self.bound:
            return None
        return self.value / self.bound


def bound_claim(name: str, value: SumValue, bound: float, gating: bool = True, scale: float = 1.0) -> Claim:
    passed = abs(value) <= bound + scale * value.error_budget
    return Claim(name, passed, gating, abs(value), bound)


def vanishing_claim(name: str, value: SumValue, scale: float = 1.0) -> Claim:
    return Claim(name, value.vanishes(scale), True, abs(value), value.error_budget)


def agreement_claim(name: str, left: SumValue, right: SumValue, scale: float = 1.0) -> Claim:
    difference = abs(left.value - right.value)
    return Claim(name, left.agrees_with(right, scale), True, difference, left.error_budget + right.error_budget)


@dataclass
class TupleCheck:
    """Outcome of checking one parameter tuple."""

    oracle: Optional[SumValue]
    fast: Optional[SumValue]
    bound: Optional[float]
    claims: list[Claim] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims if c.gating)

    @property
    def ratio(self) -> Optional[float]:
        if self.oracle is None or not self.bound:
            return None
        return abs(self.oracle) / self.bound


@dataclass
class VerificationRecord:
    """One row of a report. Parameters that do not apply to the target are None."""

    target: str
    p: Optional[int] = None
    kappa: Optional[int] = None
    lam: Optional[int] = None
    r_or_s: Optional[int] = None
    q1: Optional[int] = None
    q2: Optional[int] = None
    m1: Optional[int] = None
    m2: Optional[int] = None
    n1p: Optional[int] = None
    n1pp: Optional[int] = None
    n2: Optional[int] = None
    oracle_re: Optional[float] = None
    oracle_im: Optional[float] = None
    fast_re: Optional[float] = None
    fast_im: Optional[float] = None
    bound: Optional[float] = None
    ratio: Optional[float] = None
    passed: bool = True
    claims: list[Claim] = field(default_factory=list)
    error: Optional[str] = None
    note: Optional[str] = None

    def __post_init__(self):
        self.passed = bool(self.passed)

    @classmethod
    def from_check(cls, target: str, params: dict, check: TupleCheck) -> "VerificationRecord":
        record = cls(target=target, **params)
        if check.oracle is not None:
            record.oracle_re, record.oracle_im = check.oracle.real, check.oracle.imag
        if check.fast is not None:
            record.fast_re, record.fast_im = check.fast.real, check.fast.imag
        record.bound = check.bound
        record.ratio = check.ratio
        record.passed = check.passed
        record.claims = check.claims
        record.note = check.note
        return record

    @classmethod
    def from_error(cls, target: str, params: dict, error: Exception) -> "VerificationRecord":
        return cls(target=target, passed=False, error=f"{type(error).__name__}: {error}", **params)


@dataclass
class ReportSummary:
    total: int = 0
    passed: int = 0
    failed: int = 0
    errors: int = 0
    max_ratio: Optional[float] = None

    @classmethod
    def of(cls, records: list[VerificationRecord]) -> "ReportSummary":
        ratios = [r.ratio for r in records if r.ratio is not None]
        return cls(
            total=len(records),
            passed=sum(r.passed for r in records),
            failed=sum(not r.passed for r in records),
            errors=sum(r.error is not None for r in records),
            max_ratio=max(ratios) if ratios else None,
        )


@dataclass
class VerificationReport:
    target: str
    records: list[VerificationRecord] = field(default_factory=list)
    generated_at: Optional[str] = None
    wall_time_s: Optional[float] = None

    @property
    def summary(self) -> ReportSummary:
        return ReportSummary.of(self.records)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "target": self.target,
            "records": [_record_to_dict(r) for r in self.records],
            "summary": asdict(self.summary),
            "run": {"generated_at": self.generated_at, "wall_time_s": self.wall_time_s},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise IoFailure(f"unsupported schema_version {data.get('schema_version')}")
        run = data.get("run", {})
        records = []
        for raw in data["records"]:
            raw = dict(raw)
            raw["lam"] = raw.pop("lambda")
            raw["passed"] = raw.pop("pass")
            raw["claims"] = [Claim(**c) for c in raw["claims"]]
            records.append(VerificationRecord(**raw))
        return cls(data["target"], records, run.get("generated_at"), run.get("wall_time_s"))


def _record_to_dict(record: VerificationRecord) -> dict:
    data = asdict(record)
    data["lambda"] = data.pop("lam")
    data["pass"] = data.pop("passed")
    return data


def _csv_cell(value: Union[None, bool, int, float]) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".17g")
    return str(value)


def report_rows(report: VerificationReport) -> list[list[str]]:
    rows = []
    for record in report.records:
        data = _record_to_dict(record)
        rows.append([_csv_cell(data[column]) for column in CSV_COLUMNS])
    return rows


def emit_report(report: VerificationReport, fmt: str, path: Union[str, Path]) -> None:
    """Write the report as csv or json."""
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise IoFailure(f"unknown report format {fmt!r}")
    try:
        if fmt == "csv":
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                writer.writerows(report_rows(report))
        else:
            # repr-based float output round-trips exactly
            path.write_text(json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n")
    except OSError as e:
        logger.error(f"Failed to write report to {path}: {e}")
        raise IoFailure(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(report.records)} records to {path} ({fmt})")


def load_report(path: Union[str, Path]) -> VerificationReport:
    """Parse a JSON report written by emit_report."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    return VerificationReport.from_dict(data)


def load_csv_rows(path: Union[str, Path]) -> list[dict[str, str]]:
    try:
        with Path(path).open(newline="") as handle:
            return list(csv.DictReader(handle))
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
