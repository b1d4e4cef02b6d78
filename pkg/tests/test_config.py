from pathlib import Path

import pytest

from sumlab.config import (
    JOBS_ENV,
    SweepSpec,
    auto_lambda,
    describe,
    load_config,
    parse_config,
    parse_kappa_range,
    parse_lambda,
    resolve_spec,
)
from sumlab.errors import SpecInvalid

CONFIGS = Path(__file__).parent.parent / "configs"
DEFAULT_CONFIG = CONFIGS / "default.conf"


@pytest.mark.parametrize("kappa, lam", [(3, 2), (4, 2), (5, 3), (6, 3), (7, 3), (10, 5)])
def test_auto_lambda(kappa, lam):
    assert auto_lambda(kappa) == lam


def test_parse_config():
    overrides = parse_config(
        """
        # comment line
        primes = 3, 7
        kappa = 3..5   # trailing comment
        lambda = auto
        q_max = 2
        Q_values = 1, 2.5
        budget_scale = 0.5
        """
    )
    assert overrides == {
        "primes": (3, 7),
        "kappas": (3, 4, 5),
        "lambdas": None,
        "q_max": 2,
        "Q_values": (1.0, 2.5),
        "budget_scale": 0.5,
    }


@pytest.mark.parametrize(
    "text",
    ["colour = blue", "primes 3", "q_max = many", "kappa = 5..3", "primes = 3,,5", "budget_scale = nan", "target = x"],
)
def test_parse_config_rejects(text):
    with pytest.raises(SpecInvalid):
        parse_config(text)


def test_parse_helpers():
    assert parse_kappa_range("4") == (4,)
    assert parse_kappa_range("2 .. 4") == (2, 3, 4)
    assert parse_lambda("AUTO") is None
    assert parse_lambda("2, 3") == (2, 3)
    assert parse_lambda(" All ") == "all"


def test_default_config_matches_builtin_defaults():
    assert resolve_spec(DEFAULT_CONFIG, environ={}) == SweepSpec()


def test_acceptance_config():
    spec = resolve_spec(CONFIGS / "acceptance.conf", environ={})
    assert (spec.primes, spec.kappas, spec.q_max, spec.m_max) == ((3, 5), (3, 4, 5, 6), 12, 20)
    assert spec.max_tuples >= 1000
    assert spec.lambdas_for(6) == [2, 3, 4, 5]
    assert spec.lambdas_for(3) == [2]
    for target in ("eq4_3", "lemma6", "quintic", "circle", "oscillatory_bounds"):
        assert spec.validate(target) is spec


def test_load_config_missing_file(tmp_path):
    with pytest.raises(SpecInvalid):
        load_config(tmp_path / "missing.conf")


def test_precedence(tmp_path):
    path = tmp_path / "sweep.conf"
    path.write_text("jobs = 2\nq_max = 3\nm_max = 7\n")
    spec = resolve_spec(path, environ={})
    assert (spec.jobs, spec.q_max, spec.m_max) == (2, 3, 7)

    spec = resolve_spec(path, environ={JOBS_ENV: "4"})
    assert spec.jobs == 4

    spec = resolve_spec(path, flags={"jobs": 8, "q_max": None, "m_max": 1}, environ={JOBS_ENV: "4"})
    assert (spec.jobs, spec.q_max, spec.m_max) == (8, 3, 1)


def test_unknown_flag():
    with pytest.raises(SpecInvalid):
        resolve_spec(flags={"colour": "blue"}, environ={})


def test_lambdas_for():
    assert SweepSpec().lambdas_for(6) == [3]
    assert SweepSpec(lambdas=(2, 3, 5)).lambdas_for(5) == [2, 3]
    assert SweepSpec(kappas=(3, 5), lambdas=(2, 3)).validate().lambdas_for(3) == [2]


@pytest.mark.parametrize(
    "spec",
    [
        SweepSpec(primes=(2,)),
        SweepSpec(primes=(9,)),
        SweepSpec(primes=()),
        SweepSpec(kappas=(1,)),
        SweepSpec(lambdas=(0,)),
        SweepSpec(lambdas=(1,)),
        SweepSpec(kappas=(2,)),
        SweepSpec(kappas=(3,), lambdas=(5,)),
        SweepSpec(kappas=(4,), lambdas=(4,)),
        SweepSpec(lambdas="some"),
        SweepSpec(m_max=101),
        SweepSpec(q_max=13),
        SweepSpec(jobs=0),
        SweepSpec(budget_scale=0),
        SweepSpec(Q_values=(0.5,)),
        SweepSpec(tau_max=0),
    ],
)
def test_validate_rejects(spec):
    with pytest.raises(SpecInvalid):
        spec.validate()


def test_validate_lemma6_lambda_range():
    spec = SweepSpec(kappas=(6,), lambdas=(5,))
    assert spec.validate("lemma5") is spec
    with pytest.raises(SpecInvalid):
        spec.validate("lemma6")
    assert SweepSpec(kappas=(6,), lambdas=(4,)).validate("lemma6") is not None


def test_validate_unknown_target():
    with pytest.raises(SpecInvalid):
        SweepSpec().validate("lemma9")


def test_describe_round_trips(tmp_path):
    spec = SweepSpec(primes=(3,), kappas=(4, 5), lambdas=(2,), Q_values=(1, 2.5))
    path = tmp_path / "described.conf"
    path.write_text("\n".join(describe(spec)) + "\n")
    assert resolve_spec(path, environ={}) == spec
