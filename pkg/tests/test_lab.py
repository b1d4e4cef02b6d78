import math
from dataclasses import replace

import numpy as np
import pytest

from sumlab.config import SweepSpec
from sumlab.errors import SpecInvalid
from sumlab.lab import (
    Block,
    Task,
    geometric_points,
    oscillatory_setup,
    plan_sweep,
    run_task,
    run_verify,
    sample_blocks,
    summarize_series,
    top_decade_bounded,
)
from sumlab import oscillatory as osc
from sumlab.oscillatory import V_WEIGHT
from sumlab.report import emit_report, load_report

SMALL_EQ4_3 = SweepSpec(primes=(3,), kappas=(3,), q_max=2, m_max=2, max_tuples=30)


def without_run(report):
    data = report.to_dict()
    del data["run"]
    return data


def test_block_points():
    block = Block(("p",), ((1, 2), ("a", "b", "c")))
    assert block.size == 6
    assert [block.point(i) for i in range(6)] == [
        ("p", 1, "a"),
        ("p", 1, "b"),
        ("p", 1, "c"),
        ("p", 2, "a"),
        ("p", 2, "b"),
        ("p", 2, "c"),
    ]


def test_sample_blocks_takes_everything_under_the_limit():
    blocks = [Block((0,), ((1, 2),)), Block((1,), ((3,),))]
    assert sample_blocks(blocks, 10, seed=1) == [(0, 1), (0, 2), (1, 3)]
    assert sample_blocks([], 10, seed=1) == []


def test_sample_blocks_is_seeded_and_ordered():
    blocks = [Block((i,), (tuple(range(10)), tuple(range(10)))) for i in range(5)]
    everything = sample_blocks(blocks, 500, seed=0)
    sample = sample_blocks(blocks, 40, seed=7)
    assert len(sample) == 40
    assert sample == sample_blocks(blocks, 40, seed=7)
    assert sample == sorted(sample, key=everything.index)
    assert sample != sample_blocks(blocks, 40, seed=8)


def test_top_decade_bounded():
    assert top_decade_bounded([])
    assert top_decade_bounded([(1, 1.0), (2, 1.0), (100, 1.5)])
    assert not top_decade_bounded([(1, 1.0), (2, 1.0), (100, 3.0)])
    assert top_decade_bounded([(50, 1.0), (100, 9.0)])


def test_geometric_points():
    points = geometric_points(1.0, 1000.0, 4)
    assert points == pytest.approx([1, 10, 100, 1000])
    assert geometric_points(5.0, 5.0) == [5.0]


def test_oscillatory_setup():
    setup = oscillatory_setup(SweepSpec(primes=(3,)))
    assert (setup.p, setup.kappa, setup.lam) == (3, 7, 2)
    assert setup.Q == pytest.approx(200)


def test_truncation_covers_modulus_series():
    setup = oscillatory_setup(SweepSpec())
    for x in geometric_points(1.0, setup.Q, 8):
        q = max(1, round(x))
        a = math.floor(setup.Q) + 1
        while math.gcd(a, q) != 1:
            a += 1
        _, tail = osc.truncation_point(np.array([0.0, setup.frequency(a, q)]), setup)
        assert tail <= 1e-8, q


def test_plan_sweep_rejects():
    with pytest.raises(SpecInvalid):
        plan_sweep("lemma9", SweepSpec())
    with pytest.raises(SpecInvalid):
        plan_sweep("lemma6", SweepSpec(kappas=(6,), lambdas=(5,)))


def test_run_task_turns_errors_into_records():
    record = run_task(Task("circle", "circle_lowered", (("p", 3), ("lam", 1)), (1, 3, 1, 5.0)))
    assert not record.passed
    assert record.error.startswith("InvalidParameters")
    assert (record.p, record.lam) == (3, 1)


def test_run_task_series_note():
    record = run_task(Task("circle", "circle", (), (0, 2.0), series="delta", x=2.0))
    assert record.passed
    assert record.note.startswith("series=delta x=2")


def test_summarize_series():
    tasks = [Task("t", "circle", (), (), series="s", x=x) for x in (1.0, 2.0, 100.0)]
    records = [run_task(Task("t", "mellin", (), (0.0, tau, V_WEIGHT))) for tau in (1.0, 2.0, 100.0)]
    summaries = summarize_series("t", tasks, records)
    assert len(summaries) == 1
    assert summaries[0].note == "summary s"
    assert summaries[0].passed


def test_integral_I_doubling_series():
    tasks = [t for t in plan_sweep("oscillatory_bounds", SweepSpec()).tasks if t.series == "I"]
    xs = [t.x for t in tasks]
    assert len(xs) == 6
    assert all(b == 2 * a for a, b in zip(xs, xs[1:]))
    records = [run_task(t) for t in tasks]
    assert all(r.passed for r in records)
    assert all(r.ratio is not None and r.ratio <= 1 for r in records)
    (summary,) = summarize_series("oscillatory_bounds", tasks, records)
    assert summary.note == "summary I"
    assert summary.passed


def test_empty_sweep_passes():
    report = run_verify("eq4_3", SweepSpec(q_max=0))
    assert report.records == []
    assert report.passed


def test_circle_sweep():
    report = run_verify("circle", SweepSpec(primes=(3,), n_max=5, Q_values=(1, 3)))
    assert len(report.records) == 44
    assert report.passed
    assert report.generated_at is not None


def test_eq4_3_sweep_is_capped():
    report = run_verify("eq4_3", SMALL_EQ4_3)
    assert len(report.records) == 30
    assert report.passed


def test_parallel_sweep_matches_serial():
    serial = run_verify("eq4_3", SMALL_EQ4_3)
    parallel = run_verify("eq4_3", replace(SMALL_EQ4_3, jobs=2))
    assert without_run(serial) == without_run(parallel)


def test_small_lemma6_sweep():
    spec = SweepSpec(primes=(3,), kappas=(5,), q_max=2, m_max=3, n2_max=2, max_tuples=20)
    report = run_verify("lemma6", spec)
    assert len(report.records) == 20
    assert report.passed, [r for r in report.records if not r.passed][:3]


@pytest.mark.parametrize("target", ["lemma6", "lemma7"])
def test_sweep_writes_json(tmp_path, target):
    spec = SweepSpec(primes=(3,), kappas=(5,), q_max=2, m_max=3, n2_max=2, max_tuples=10)
    report = run_verify(target, spec)
    assert report.records
    path = tmp_path / "report.json"
    emit_report(report, "json", path)
    loaded = load_report(path)
    assert [r.passed for r in loaded.records] == [r.passed for r in report.records]
    assert all(type(c.passed) is bool for r in loaded.records for c in r.claims)


@pytest.mark.slow
@pytest.mark.parametrize("target", ["eq4_3", "cstar_split", "lemma5", "lemma6", "lemma7", "quintic"])
def test_default_sweeps(target):
    report = run_verify(target, SweepSpec(max_tuples=100))
    assert report.passed, [r for r in report.records if not r.passed][:3]


@pytest.mark.slow
def test_oscillatory_sweep():
    report = run_verify("oscillatory_bounds", SweepSpec(primes=(3,)))
    assert report.passed, [r for r in report.records if not r.passed][:3]
