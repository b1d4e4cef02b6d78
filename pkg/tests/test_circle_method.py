import math

import pytest

from sumlab.circle_method import delta_kloosterman, delta_lowered, delta_modulus, expand_delta, zeta_integral
from sumlab.errors import InvalidParameters


def test_delta_at_zero():
    assert delta_kloosterman(0, 1) == pytest.approx(1, abs=1e-12)


def test_delta_off_zero():
    assert abs(delta_kloosterman(5, 2)) < 1e-12


@pytest.mark.parametrize("Q", [1, 2, 3, 5, 10, 20])
def test_kloosterman_circle_method_is_exact(Q):
    for n in range(-50, 51):
        expected = 1.0 if n == 0 else 0.0
        assert abs(delta_kloosterman(n, Q) - expected) < 1e-8, n


def test_expansion_uses_farey_range():
    expansion = expand_delta(3, 4)
    for q, a, _ in expansion.terms:
        assert 1 <= q <= 4
        assert 4 < a <= q + 4
        assert math.gcd(a, q) == 1


def test_zeta_integral():
    assert zeta_integral(0, 3, 2) == 1
    # n = aq: the integral of e(-zeta) over a full period
    assert abs(zeta_integral(6, 3, 2)) < 1e-15


@pytest.mark.parametrize("n, expected", [(9, 0.0), (0, 1.0), (3, 0.0), (18, 0.0), (-9, 0.0)])
def test_delta_lowered(n, expected):
    assert delta_lowered(n, 3, 2, 5) == pytest.approx(expected, abs=1e-8)


def test_delta_lowered_skips_non_multiples_exactly():
    assert delta_lowered(3, 3, 2, 5) == 0.0


def test_delta_lowered_matches_delta():
    for n in range(-100, 101):
        assert delta_lowered(n, 3, 2, 4) == pytest.approx(delta_kloosterman(n, 4), abs=1e-8)


def test_invalid_arguments():
    with pytest.raises(InvalidParameters):
        expand_delta(1, 0.5)
    with pytest.raises(InvalidParameters):
        delta_lowered(1, 3, 1, 5)


def test_delta_modulus():
    assert delta_modulus(9 * 200**2, 3, 2) == pytest.approx(200)
