import math

import pytest

from sumlab.classic_sums import kloosterman_sum, ramanujan_closed, ramanujan_sum, weil_bound, weil_bound_ratio


@pytest.mark.parametrize("m, c, expected", [(0, 3, 2), (0, 7, 6), (1, 3, -1), (3, 9, -3), (2, 12, 2), (5, 1, 1)])
def test_ramanujan(m, c, expected):
    assert ramanujan_closed(m, c) == expected
    assert ramanujan_sum(m, c).value == pytest.approx(expected, abs=1e-9)


def test_ramanujan_direct_matches_closed_form():
    for c in range(1, 40):
        for m in range(-5, 45):
            direct = ramanujan_sum(m, c)
            assert direct.agrees_with(ramanujan_closed(m, c))


@pytest.mark.parametrize("a, b, c, expected", [(1, 1, 2, 1), (1, 1, 3, -1), (0, 0, 5, 4), (3, 4, 1, 1)])
def test_kloosterman_values(a, b, c, expected):
    assert kloosterman_sum(a, b, c).value == pytest.approx(expected, abs=1e-12)


def test_kloosterman_is_real_and_symmetric():
    for c in (5, 9, 15, 27):
        for a in range(c):
            for b in range(c):
                value = kloosterman_sum(a, b, c).value
                assert abs(value.imag) < 1e-9
                assert value == pytest.approx(kloosterman_sum(b, a, c).value, abs=1e-9)


def test_weil_bound_ratio():
    assert weil_bound_ratio(0, 0, 5) == pytest.approx(0.4)
    assert weil_bound(1, 1, 9) == pytest.approx(3 * 3)


@pytest.mark.parametrize("c", [3, 5, 7, 11, 13, 97])
def test_weil_bound_holds_for_primes(c):
    for a in range(c):
        for b in range(c):
            assert weil_bound_ratio(a, b, c) <= 1 + 1e-9


@pytest.mark.parametrize("c", [9, 25, 27, 45, 60, 81, 100])
def test_weil_bound_holds_for_composites(c):
    for a in range(0, c, 3):
        for b in range(c):
            assert weil_bound_ratio(a, b, c) <= 1 + 1e-9
    assert not math.isnan(weil_bound_ratio(1, 1, c))


@pytest.mark.parametrize("c1, c2", [(3, 4), (5, 7), (8, 9), (7, 11)])
def test_kloosterman_twisted_multiplicativity(c1, c2):
    c2_bar = pow(c2, -1, c1)
    c1_bar = pow(c1, -1, c2)
    for a in range(-3, 6):
        for b in (0, 1, 2, 6, 15):
            whole = kloosterman_sum(a, b, c1 * c2)
            split = kloosterman_sum(a * c2_bar, b * c2_bar, c1) * kloosterman_sum(a * c1_bar, b * c1_bar, c2)
            assert whole.agrees_with(split)
