import json

import numpy as np
import pytest

from sumlab.errors import IoFailure
from sumlab.report import (
    CSV_COLUMNS,
    Claim,
    TupleCheck,
    VerificationRecord,
    VerificationReport,
    agreement_claim,
    bound_claim,
    emit_report,
    load_csv_rows,
    load_report,
    vanishing_claim,
)
from sumlab.values import SumValue


def sample_report():
    check = TupleCheck(
        oracle=SumValue(3 + 4j, 1e-12),
        fast=SumValue(3 + 4j, 1e-12),
        bound=10.0,
        claims=[Claim("bound", True, value=5.0, bound=10.0), Claim("info", False, gating=False)],
    )
    records = [
        VerificationRecord.from_check("lemma6", {"p": 3, "kappa": 6, "lam": 3, "r_or_s": 0, "n2": -1}, check),
        VerificationRecord.from_error("lemma6", {"p": 3, "kappa": 6}, ZeroDivisionError("boom")),
    ]
    return VerificationReport("lemma6", records, generated_at="2024-06-01T00:00:00+00:00", wall_time_s=0.5)


def test_claims():
    value = SumValue(1.0, 1e-15)
    assert bound_claim("b", value, 1.0).passed
    assert not bound_claim("b", SumValue(2.0, 1e-15), 1.0).passed
    assert vanishing_claim("v", SumValue(1e-16, 1e-15)).passed
    assert not vanishing_claim("v", value).passed
    assert agreement_claim("a", value, SumValue(1.0 + 1e-16, 1e-15)).passed
    assert Claim("c", True, value=1.0, bound=0.0).ratio is None


def test_claims_from_numpy_values_serialise(tmp_path):
    value = SumValue(np.complex128(0.5 + 0j), 1e-15)
    claims = [bound_claim("b", value, np.float64(1.0)), vanishing_claim("v", value)]
    assert all(type(c.passed) is bool for c in claims)
    record = VerificationRecord("lemma7", passed=np.bool_(True), claims=claims)
    assert type(record.passed) is bool
    path = tmp_path / "r.json"
    emit_report(VerificationReport("lemma7", [record]), "json", path)
    assert json.loads(path.read_text())["records"][0]["claims"][0]["passed"] is True


def test_record_from_check():
    record = sample_report().records[0]
    assert record.passed
    assert (record.oracle_re, record.oracle_im) == (3.0, 4.0)
    assert record.ratio == pytest.approx(0.5)


def test_non_gating_claims_do_not_fail():
    check = TupleCheck(None, None, None, claims=[Claim("info", False, gating=False)])
    assert check.passed


def test_summary():
    summary = sample_report().summary
    assert (summary.total, summary.passed, summary.failed, summary.errors) == (2, 1, 1, 1)
    assert summary.max_ratio == pytest.approx(0.5)
    assert not sample_report().passed


def test_empty_report_csv_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_report(VerificationReport("eq4_3"), "csv", path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
    assert VerificationReport("eq4_3").passed


def test_csv_cells(tmp_path):
    path = tmp_path / "report.csv"
    emit_report(sample_report(), "csv", path)
    rows = load_csv_rows(path)
    assert len(rows) == 2
    assert rows[0]["pass"] == "true"
    assert rows[1]["pass"] == "false"
    assert rows[0]["lambda"] == "3"
    assert rows[0]["n2"] == "-1"
    assert rows[0]["q1"] == ""
    assert float(rows[0]["oracle_re"]) == 3.0


def test_json_round_trip(tmp_path):
    path = tmp_path / "report.json"
    report = sample_report()
    emit_report(report, "json", path)
    data = json.loads(path.read_text())
    assert data["schema_version"] == 1
    assert data["run"]["wall_time_s"] == 0.5
    assert data["records"][0]["pass"] is True
    assert load_report(path) == report


def test_json_schema_version_checked(tmp_path):
    path = tmp_path / "report.json"
    path.write_text(json.dumps({"schema_version": 99, "target": "x", "records": []}))
    with pytest.raises(IoFailure):
        load_report(path)


def test_io_failures(tmp_path):
    with pytest.raises(IoFailure):
        emit_report(sample_report(), "xml", tmp_path / "report.xml")
    with pytest.raises(IoFailure):
        emit_report(sample_report(), "json", tmp_path / "missing" / "report.json")
    with pytest.raises(IoFailure):
        load_report(tmp_path / "absent.json")
