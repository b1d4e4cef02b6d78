import sys

import pytest

import check


@pytest.fixture
def fake_runs(monkeypatch, tmp_path):
    """Replace subprocess runs with canned exit codes keyed by step name."""
    codes = {}
    ran = []

    def run_step(step):
        ran.append(step.name)
        step.returncode = codes.get(step.name, 0)
        return step

    monkeypatch.setattr(check, "run_step", run_step)
    monkeypatch.setattr(check, "REPORT_DIR", tmp_path)
    return codes, ran


def run_main(monkeypatch, *argv):
    monkeypatch.setattr(sys, "argv", ["check.py", *argv])
    return check.main()


def test_step_outcome_names_verify_exit_codes(tmp_path):
    step = check.verify_step("lemma6", tmp_path / "x.conf", 4, "csv")
    assert step.outcome() == "not run"
    assert step.cmd[-2:] == ["--jobs", "4"]
    assert step.report.suffix == ".csv"
    for code, text in check.VERIFY_EXITS.items():
        step.returncode = code
        assert step.outcome() == text
    step.returncode = 9
    assert step.outcome() == "exit 9"
    assert check.test_step(False).cmd[-2:] == ["-m", "not slow"]
    assert check.test_step(True).outcome() == "not run"


def test_all_targets_pass(monkeypatch, fake_runs, capsys):
    _, ran = fake_runs
    assert run_main(monkeypatch, "--skip-lint", "--skip-tests") == 0
    assert ran == check.TARGETS
    assert "acceptance.conf" not in capsys.readouterr().out


def test_failed_tests_stop_the_run(monkeypatch, fake_runs):
    codes, ran = fake_runs
    codes["pytest"] = 1
    assert run_main(monkeypatch) == 1
    assert ran == ["ruff", "pytest"]


def test_failing_target_does_not_stop_the_run(monkeypatch, fake_runs, capsys):
    codes, ran = fake_runs
    codes["lemma5"] = 2
    assert run_main(monkeypatch, "--verify-only", "--acceptance", "-t", "lemma5", "-t", "quintic") == 1
    assert ran == ["lemma5", "quintic"]
    out = capsys.readouterr().out
    assert "invalid sweep spec" in out
    assert "acceptance.conf" in out


def test_missing_config(monkeypatch, fake_runs, tmp_path):
    _, ran = fake_runs
    assert run_main(monkeypatch, "--config", str(tmp_path / "none.conf")) == 1
    assert ran == []
