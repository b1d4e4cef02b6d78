import math

import numpy as np
import pytest

from sumlab.errors import InvalidParameters, NearPole, QuadratureFailure
from sumlab.oscillatory import (
    TAU_STEP,
    U_WEIGHT,
    V_WEIGHT,
    BumpWeight,
    KernelSetup,
    LanglandsParams,
    gamma_pm,
    integral_I,
    integral_J_pm,
    integral_K,
    integration_by_parts_bound,
    log_nodes,
    j_pm_integrand,
    mellin_decay_bound,
    mellin_V,
    mellin_V_grid,
    mellin_V_mpmath,
    sample_triples,
    truncation_point,
    zeta_nodes,
)

SMALL = KernelSetup(N=9 * 100, p=3, kappa=4, lam=2)


def test_bump_weights():
    assert U_WEIGHT(1.5) == pytest.approx(1.0)
    assert U_WEIGHT(1.0) == pytest.approx(1.0)
    assert U_WEIGHT(0.5) == 0.0
    assert 0 < U_WEIGHT(0.75) < 1
    assert V_WEIGHT(1.5) == pytest.approx(1.0)
    assert V_WEIGHT(2.0) == 0.0
    values = V_WEIGHT(np.array([0.5, 1.25, 1.75, 3.0]))
    assert values[0] == values[-1] == 0.0
    assert values[1] == pytest.approx(values[2])


def test_bump_weight_validation():
    with pytest.raises(InvalidParameters):
        BumpWeight((2.0, 1.0))
    with pytest.raises(InvalidParameters):
        BumpWeight((1.0, 2.0), plateau=(0.5, 1.5))


def test_plateau_mass():
    # smooth steps are symmetric, so each ramp of width 1/2 contributes 1/4
    assert U_WEIGHT.mass() == pytest.approx(1.5, rel=1e-8)


def test_kernel_setup():
    assert SMALL.Q == pytest.approx(10)
    assert SMALL.frequency(11, 1) == pytest.approx(900 / 99)
    assert SMALL.omega(1, 11, 1, SMALL.center(1, 11)) == pytest.approx(0, abs=1e-9)
    with pytest.raises(InvalidParameters):
        KernelSetup(N=900, p=3, kappa=2, lam=2)
    with pytest.raises(InvalidParameters):
        KernelSetup(N=900, p=3, kappa=4, lam=2, sign=0)


def test_langlands_params_sum_to_zero():
    with pytest.raises(InvalidParameters):
        LanglandsParams((1j, 0j, 0j))
    for mu in sample_triples():
        assert abs(sum(mu.values)) < 1e-12


def test_integral_I_at_zero_frequency():
    value = integral_I(0, 11, 1, 0.0, SMALL)
    assert value.value.real == pytest.approx(U_WEIGHT.mass(), rel=1e-8)
    assert value.value.real >= 1


def test_integral_I_rejects_bad_moduli():
    with pytest.raises(InvalidParameters):
        integral_I(1, 0, 1, 0.5, SMALL)


@pytest.mark.parametrize("m, zeta", [(5, 0.0), (-3, 0.9), (40, 0.2)])
def test_integral_I_integration_by_parts(m, zeta):
    omega = SMALL.omega(m, 11, 1, zeta)
    assert abs(integral_I(m, 11, 1, zeta, SMALL)) <= integration_by_parts_bound(omega)


def test_mellin_at_s_one_is_mass():
    assert mellin_V(0, 1).value.real == pytest.approx(V_WEIGHT.mass(), rel=1e-8)


def test_mellin_against_mpmath():
    assert abs(mellin_V(1.0, 0.5).value - mellin_V_mpmath(1.0, 0.5)) <= 1e-9


def test_mellin_grid_matches_quad():
    grid = mellin_V_grid(np.array([0.0, 1.0]), np.array([0.0, 3.0]))
    for i, r in enumerate((0.0, 1.0)):
        for j, tau in enumerate((0.0, 3.0)):
            assert grid[i, j] == pytest.approx(mellin_V(r, complex(0.5, -tau)).value, abs=1e-9)


@pytest.mark.parametrize("r", [0, 0.5, 1])
@pytest.mark.parametrize("tau", [10, 50, 200])
def test_mellin_second_derivative_bound(r, tau):
    assert abs(mellin_V(r, complex(0.5, -tau))) <= mellin_decay_bound(tau)


@pytest.mark.parametrize("s", [complex(0.3, 2.0), complex(-0.5, 7.5), complex(1.2, -4.0)])
@pytest.mark.parametrize("mu", [LanglandsParams(), LanglandsParams((0.5, -0.25, -0.25))])
def test_gamma_reflection(s, mu):
    left = gamma_pm(s.conjugate(), mu, sign=1)
    right = gamma_pm(s, mu, sign=-1).conjugate()
    assert abs(left - right) <= 1e-12 * max(1.0, abs(left))


@pytest.mark.parametrize("sign", [1, -1])
def test_gamma_unit_size_on_critical_line(sign):
    for tau in np.linspace(-300, 300, 61):
        assert abs(gamma_pm(complex(-0.5, tau), sign=sign)) <= 1 + 1e-12


def test_gamma_near_pole():
    with pytest.raises(NearPole):
        gamma_pm(complex(-1 + 1e-8, 0))


def test_j_pm_integrand_at_zero_tau():
    zeta = 0.5
    r = zeta * SMALL.frequency(11, 1)
    expected = gamma_pm(-0.5) * mellin_V(r, 0.5).value / (2 * math.pi)
    assert j_pm_integrand(0.0, 1.0, 11, 1, zeta, SMALL) == pytest.approx(expected, rel=1e-6)


def test_truncation_doubling_agrees():
    r = 0.5 * SMALL.frequency(11, 1)
    T, tail = truncation_point(np.array([r]), SMALL)
    assert tail <= 1e-8
    adaptive = integral_J_pm(1.0, 11, 1, 0.5, SMALL)
    doubled = integral_J_pm(1.0, 11, 1, 0.5, SMALL, truncation=2 * T)
    assert abs(adaptive.value - doubled.value) <= 1e-7


def test_truncation_gives_up():
    with pytest.raises(QuadratureFailure):
        truncation_point(np.array([1.0]), SMALL, tol=1e-30)


def test_log_grid_grows_with_bandwidth():
    assert log_nodes(10.0, V_WEIGHT) == 513
    assert log_nodes(20000.0, V_WEIGHT) > log_nodes(10000.0, V_WEIGHT) > 513


def test_mellin_grid_far_from_stationary_range():
    grid = mellin_V_grid(np.array([0.0, 50.0]), np.array([6000.0, -6000.0]))
    assert np.max(np.abs(grid)) <= 1e-10


def test_truncation_scales_with_frequency():
    setup = KernelSetup(N=9 * 200**2, p=3, kappa=7, lam=2)
    r = setup.frequency(201, 1)
    T, tail = truncation_point(np.array([0.0, r]), setup)
    assert T >= 2 * math.pi * 2 * r
    assert tail <= 1e-8


def test_j_pm_rejects_nonpositive_y():
    with pytest.raises(InvalidParameters):
        integral_J_pm(0.0, 11, 1, 0.5, SMALL)


@pytest.mark.parametrize("refine", [True, False])
def test_zeta_nodes_cover_unit_interval(refine):
    nodes, weights = zeta_nodes(1, 11, 1, SMALL, refine)
    assert weights.sum() == pytest.approx(1.0, rel=1e-12)
    assert nodes.min() >= 0 and nodes.max() <= 1


def test_integral_K_refinement_agrees():
    refined = integral_K(1, 1.0, 11, 1, SMALL, refine=True)
    full = integral_K(1, 1.0, 11, 1, SMALL, refine=False)
    assert abs(refined.value - full.value) <= 1e-7


@pytest.mark.slow
def test_integral_K_refinement_agrees_at_scale():
    setup = KernelSetup(N=9 * 200**2, p=3, kappa=7, lam=2)
    refined = integral_K(1, 1.0, 201, 1, setup, refine=True)
    full = integral_K(1, 1.0, 201, 1, setup, refine=False)
    assert abs(refined.value - full.value) <= 1e-7


def test_halving_tau_step_agrees():
    coarse = integral_J_pm(1.0, 11, 1, 0.5, SMALL)
    fine = integral_J_pm(1.0, 11, 1, 0.5, SMALL, step=TAU_STEP / 2)
    assert abs(coarse.value - fine.value) <= 1e-7
