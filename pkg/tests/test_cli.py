import json

import pytest

from sumlab import lab
from sumlab.cli import EXIT_FAILED, EXIT_IO_FAILURE, EXIT_OK, EXIT_SPEC_INVALID, main
from sumlab.config import JOBS_ENV
from sumlab.errors import SumLabError
from sumlab.report import CSV_COLUMNS


@pytest.fixture(autouse=True)
def serial_jobs(monkeypatch):
    monkeypatch.delenv(JOBS_ENV, raising=False)


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.conf"
    path.write_text("primes = 3\nkappa = 3\nq_max = 2\nm_max = 2\nn_max = 4\nQ_values = 1, 2\nmax_tuples = 10\n")
    return path


def test_list(small_config, capsys):
    assert main(["list", "--config", str(small_config)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "lemma6" in out
    assert "primes = 3" in out


def test_verify_circle(small_config, tmp_path, capsys):
    out = tmp_path / "circle.json"
    assert main(["verify", "circle", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["target"] == "circle"
    assert data["summary"]["failed"] == 0
    assert "✅ circle" in capsys.readouterr().out


def test_verify_format_from_suffix(small_config, tmp_path):
    out = tmp_path / "eq4_3.csv"
    assert main(["verify", "eq4_3", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_verify_flags_override_config(small_config, tmp_path):
    out = tmp_path / "eq4_3.json"
    args = ["verify", "eq4_3", "--config", str(small_config), "--out", str(out)]
    args += ["--p", "5", "--kappa", "4", "--lambda", "3"]
    assert main(args) == EXIT_OK
    records = json.loads(out.read_text())["records"]
    assert {(r["p"], r["lambda"]) for r in records} == {(5, 3)}


def test_lambda_not_below_kappa(tmp_path):
    out = tmp_path / "eq4_3.json"
    assert main(["verify", "eq4_3", "--lambda", "5", "--kappa", "3", "--out", str(out)]) == EXIT_SPEC_INVALID
    assert not out.exists()


def test_lemma6_lambda_out_of_range(tmp_path):
    out = tmp_path / "lemma6.json"
    assert main(["verify", "lemma6", "--lambda", "5", "--kappa", "6", "--out", str(out)]) == EXIT_SPEC_INVALID
    assert not out.exists()


def test_bad_config(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("colour = blue\n")
    assert main(["verify", "circle", "--config", str(path)]) == EXIT_SPEC_INVALID


def test_unwritable_report(small_config, tmp_path):
    out = tmp_path / "missing" / "circle.json"
    assert main(["verify", "circle", "--config", str(small_config), "--out", str(out)]) == EXIT_IO_FAILURE


def test_failing_sweep_exit_code(small_config, tmp_path, monkeypatch):
    def broken(n, Q, scale):
        raise SumLabError("broken checker")

    monkeypatch.setitem(lab.CHECKERS, "circle", broken)
    out = tmp_path / "circle.json"
    assert main(["verify", "circle", "--config", str(small_config), "--out", str(out)]) == EXIT_FAILED
