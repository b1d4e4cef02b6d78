"""
Kloosterman's form of the circle method for the Kronecker delta, and its conductor-lowered variant.

    delta(n) = 2 Re sum_{q <= Q} sum_{Q < a <= q + Q, (a, q) = 1} (1 / aq) e(n a_bar / q) I(n, a, q)

with I(n, a, q) the integral of e(-n zeta / (aq)) over zeta in [0, 1], taken in closed form.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field

from sumlab.errors import InvalidParameters
from sumlab.modarith import mod_inverse
from sumlab.values import unit_root

logger = logging.getLogger(__name__)


@dataclass
class DeltaExpansion:
    n: int
    Q: float
    terms: list[tuple[int, int, complex]] = field(default_factory=list)

    @property
    def value(self) -> float:
        return 2.0 * math.fsum(c.real for _, _, c in self.terms)


def zeta_integral(n: int, a: int, q: int) -> complex:
    """Integral over [0, 1] of e(-n zeta / (aq)): 1 for n = 0, else (1 - e(-n/(aq))) aq / (2 pi i n)."""
    if n == 0:
        return 1.0 + 0j
    aq = a * q
    return (1 - cmath.exp(-2j * math.pi * n / aq)) * aq / (2j * math.pi * n)


def expand_delta(n: int, Q: float) -> DeltaExpansion:
    if Q < 1:
        raise InvalidParameters(f"Q must be >= 1, got {Q}")
    expansion = DeltaExpansion(n, Q)
    floor_q = math.floor(Q)
    for q in range(1, floor_q + 1):
        for a in range(floor_q + 1, math.floor(q + Q) + 1):
            if math.gcd(a, q) != 1:
                continue
            contribution = unit_root(n * mod_inverse(a, q), q) * zeta_integral(n, a, q) / (a * q)
            expansion.terms.append((q, a, contribution))
    return expansion


def delta_kloosterman(n: int, Q: float) -> float:
    return expand_delta(n, Q).value


def delta_lowered(n: int, p: int, lam: int, Q: float) -> float:
    """delta(n) = delta(n / p^lambda) 1[p^lambda | n]."""
    if lam < 2:
        raise InvalidParameters(f"lambda must be >= 2, got {lam}")
    if n % p**lam:
        return 0.0
    return delta_kloosterman(n // p**lam, Q)


def delta_modulus(N: float, p: int, lam: int) -> float:
    """Q = sqrt(N / p^lambda), the expansion length that balances the delta method."""
    return math.sqrt(N / p**lam)
