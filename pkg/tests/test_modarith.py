import numpy as np
import pytest

from sumlab.errors import InvalidParameters, NonCoprimeModuli, NotAUnit, NotInvertible, ZeroPolynomial
from sumlab.modarith import (
    FactoredModulus,
    PrimePowerModulus,
    crt_combine,
    discrete_log,
    exhaustive_roots,
    hensel_roots,
    mod_inverse,
    p_adic_split,
    primitive_root,
    unit_residues,
    valuation,
)


@pytest.mark.parametrize("a, m, expected", [(3, 7, 5), (2, 9, 5), (-1, 5, 4), (7, 1, 0)])
def test_mod_inverse(a, m, expected):
    assert mod_inverse(a, m) == expected


def test_mod_inverse_rejects_non_units():
    with pytest.raises(NotInvertible):
        mod_inverse(3, 9)


def test_crt_combine():
    assert crt_combine([(1, 3), (2, 5)]) == 7
    assert crt_combine([]) == 0


def test_crt_combine_needs_coprime_moduli():
    with pytest.raises(NonCoprimeModuli):
        crt_combine([(1, 6), (2, 9)])


@pytest.mark.parametrize("q, p, expected", [(18, 3, (2, 2)), (7, 3, (0, 7)), (25, 5, (2, 1))])
def test_p_adic_split(q, p, expected):
    assert p_adic_split(q, p) == expected


def test_valuation():
    assert valuation(54, 3) == 3
    assert valuation(-10, 5) == 1
    assert valuation(0, 3) == float("inf")


@pytest.mark.parametrize("p, k, expected", [(3, 2, 2), (5, 2, 2), (7, 1, 3)])
def test_primitive_root(p, k, expected):
    assert primitive_root(PrimePowerModulus(p, k)) == expected


def test_discrete_log():
    m = PrimePowerModulus(3, 2)
    assert discrete_log(2, 7, m) == 4
    assert discrete_log(2, 1, m) == 0
    for j in range(m.phi):
        assert discrete_log(2, pow(2, j, 9), m) == j


def test_discrete_log_rejects_non_units():
    with pytest.raises(NotAUnit):
        discrete_log(2, 6, PrimePowerModulus(3, 2))


@pytest.mark.parametrize("p, k", [(2, 3), (9, 1), (3, 0)])
def test_prime_power_modulus_validation(p, k):
    with pytest.raises(InvalidParameters):
        PrimePowerModulus(p, k)


def test_factored_modulus_round_trip():
    modulus = FactoredModulus.split(72, 3)
    assert modulus.factors == (9, 8)
    for x in range(modulus.value):
        assert modulus.combine(modulus.reduce(x)) == x


def test_unit_residues():
    assert unit_residues(1) == (0,)
    assert unit_residues(9) == (1, 2, 4, 5, 7, 8)


def test_hensel_square_roots_of_one():
    assert hensel_roots([-1, 0, 1], PrimePowerModulus(3, 2)) == [1, 8]


@pytest.mark.parametrize(
    "coeffs, p, k",
    [
        ([-1, 0, 1], 5, 3),
        ([0, 0, 1], 3, 3),  # singular root 0
        ([2, -3, 1], 3, 4),
        ([0, 3, 0, 1], 3, 3),
        ([1, 1, 1, 1, 1, 1], 5, 2),
    ],
)
def test_hensel_matches_exhaustive_scan(coeffs, p, k):
    m = PrimePowerModulus(p, k)
    assert hensel_roots(coeffs, m) == exhaustive_roots(coeffs, m.value)


def test_hensel_rejects_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        hensel_roots([9, 18], PrimePowerModulus(3, 2))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_hensel_matches_exhaustive_on_random_polynomials(p):
    rng = np.random.default_rng(p)
    for _ in range(40):
        degree = int(rng.integers(1, 6))
        coeffs = [int(c) for c in rng.integers(-50, 50, size=degree + 1)]
        coeffs[-1] = coeffs[-1] * p + 1
        for k in (1, 2, 3):
            m = PrimePowerModulus(p, k)
            assert hensel_roots(coeffs, m) == exhaustive_roots(coeffs, m.value), coeffs
