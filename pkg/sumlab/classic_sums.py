"""
Ramanujan and Kloosterman sums with the Weil bound.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from sympy import divisor_count, mobius, totient

from sumlab.modarith import mod_inverse, unit_residues
from sumlab.values import SumValue, unit_roots

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1024)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    units = np.array(unit_residues(c), dtype=np.int64)
    inverses = np.array([mod_inverse(int(x), c) for x in units], dtype=np.int64)
    units.flags.writeable = False
    inverses.flags.writeable = False
    return units, inverses


def ramanujan_sum(m: int, c: int) -> SumValue:
    """c_c(m) = sum over units alpha mod c of e(m alpha / c), summed directly."""
    units, _ = _units_and_inverses(c)
    return SumValue.from_array(unit_roots((m % c) * units, c))


@lru_cache(maxsize=1 << 14)
def ramanujan_closed(m: int, c: int) -> int:
    """mu(c/(m,c)) phi(c) / phi(c/(m,c))."""
    d = c // math.gcd(m, c)
    return int(mobius(d)) * int(totient(c)) // int(totient(d))


@lru_cache(maxsize=1 << 18)
def _kloosterman(a: int, b: int, c: int) -> SumValue:
    units, inverses = _units_and_inverses(c)
    return SumValue.from_array(unit_roots((a * units + b * inverses) % c, c))


def kloosterman_sum(a: int, b: int, c: int) -> SumValue:
    """S(a, b; c) summed over the units of c. S(a, b; 1) = 1."""
    a %= c
    b %= c
    # S(a, b; c) = S(1, ab; c) for a unit a
    if a and math.gcd(a, c) == 1:
        return _kloosterman(1, a * b % c, c)
    return _kloosterman(a, b, c)


def weil_bound(a: int, b: int, c: int) -> float:
    return int(divisor_count(c)) * math.sqrt(math.gcd(a, b, c)) * math.sqrt(c)


def weil_bound_ratio(a: int, b: int, c: int) -> float:
    """|S(a,b;c)| / (d(c) (a,b,c)^(1/2) c^(1/2))."""
    return abs(kloosterman_sum(a, b, c)) / weil_bound(a, b, c)
