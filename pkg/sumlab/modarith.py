"""
Exact modular arithmetic over prime powers and composite moduli.

Inverses, CRT, p-adic valuations, primitive roots, discrete logarithms and Hensel lifting.
Heavy lifting is delegated to sympy.ntheory and sympy's dense polynomial tools over GF(p).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import isprime, mod_inverse as _sympy_mod_inverse
from sympy.ntheory import discrete_log as _sympy_discrete_log
from sympy.ntheory import is_primitive_root
from sympy.ntheory.modular import crt
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_diff, gf_eval

from sumlab.errors import InvalidParameters, NonCoprimeModuli, NotAUnit, NotInvertible, ZeroPolynomial

logger = logging.getLogger(__name__)

MAX_MODULUS = 1 << 40
MAX_HENSEL_MODULUS = 1 << 30
MAX_HENSEL_DEGREE = 8


@dataclass(frozen=True)
class PrimePowerModulus:
    """The modulus p^k for an odd prime p."""

    p: int
    k: int

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise InvalidParameters(f"p must be an odd prime, got {self.p}")
        if self.k < 1:
            raise InvalidParameters(f"exponent must be >= 1, got {self.k}")
        if self.p**self.k > MAX_MODULUS:
            raise InvalidParameters(f"{self.p}^{self.k} exceeds the modulus cap 2^40")

    @property
    def value(self) -> int:
        return self.p**self.k

    @property
    def phi(self) -> int:
        return (self.p - 1) * self.p ** (self.k - 1)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.p}^{self.k}"


@dataclass(frozen=True)
class FactoredModulus:
    """A modulus given by pairwise coprime factors, e.g. q = p^s * q'."""

    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(f < 1 for f in self.factors):
            raise InvalidParameters(f"factors must be positive, got {self.factors}")
        for i, f in enumerate(self.factors):
            for g in self.factors[i + 1 :]:
                if math.gcd(f, g) != 1:
                    raise NonCoprimeModuli(f"factors {f} and {g} are not coprime")

    @classmethod
    def split(cls, q: int, p: int) -> "FactoredModulus":
        s, q_prime = p_adic_split(q, p)
        return cls((p**s, q_prime))

    @property
    def value(self) -> int:
        return math.prod(self.factors)

    def reduce(self, x: int) -> tuple[int, ...]:
        return tuple(x % f for f in self.factors)

    def combine(self, residues: Sequence[int]) -> int:
        return crt_combine(list(zip(residues, self.factors)))


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m in [0, m). Modulo 1 the inverse is 0."""
    if m < 1:
        raise InvalidParameters(f"modulus must be >= 1, got {m}")
    if m == 1:
        return 0
    if math.gcd(a, m) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {m}")
    return int(_sympy_mod_inverse(a % m, m))


def is_unit(a: int, m: int) -> bool:
    return math.gcd(a, m) == 1


@lru_cache(maxsize=256)
def unit_residues(m: int) -> tuple[int, ...]:
    """Residues x mod m with gcd(x, m) = 1; modulo 1 this is (0,)."""
    if m == 1:
        return (0,)
    return tuple(x for x in range(m) if math.gcd(x, m) == 1)


def crt_combine(residue_pairs: Iterable[tuple[int, int]]) -> int:
    """Unique residue modulo the product congruent to each (residue, modulus) pair."""
    pairs = list(residue_pairs)
    if not pairs:
        return 0
    moduli = [m for _, m in pairs]
    for i, m in enumerate(moduli):
        for n in moduli[i + 1 :]:
            if math.gcd(m, n) != 1:
                raise NonCoprimeModuli(f"moduli {m} and {n} are not coprime")
    result = crt(moduli, [r % m for r, m in pairs])
    return int(result[0]) % math.prod(moduli)


def p_adic_split(q: int, p: int) -> tuple[int, int]:
    """Write q = p^s * q' with p not dividing q'."""
    if q < 1:
        raise InvalidParameters(f"q must be >= 1, got {q}")
    s = 0
    while q % p == 0:
        q //= p
        s += 1
    return s, q


def valuation(n: int, p: int) -> float:
    """p-adic valuation of n; infinite for n = 0."""
    if n == 0:
        return math.inf
    return p_adic_split(abs(n), p)[0]


@lru_cache(maxsize=64)
def primitive_root(m: PrimePowerModulus) -> int:
    """Smallest primitive root modulo p^k."""
    for g in range(2, m.value):
        if is_primitive_root(g, m.value):
            return g
    raise InvalidParameters(f"no primitive root found modulo {m}")


def discrete_log(g: int, a: int, m: PrimePowerModulus) -> int:
    """Exponent j in [0, phi(p^k)) with g^j = a mod p^k."""
    if a % m.p == 0:
        raise NotAUnit(f"{a} is not a unit modulo {m}")
    a %= m.value
    if a == 1:
        return 0
    return int(_sympy_discrete_log(m.value, a, g)) % m.phi


def _to_dense(coeffs: Sequence[int], modulus: int) -> list[int]:
    """Lowest-degree-first integer coefficients to a reduced high-degree-first list."""
    dense = [int(c) % modulus for c in reversed(coeffs)]
    while dense and dense[0] == 0:
        dense.pop(0)
    return dense


def hensel_roots(coeffs: Sequence[int], m: PrimePowerModulus) -> list[int]:
    """
    All roots of f modulo p^k, f given lowest degree first.

    Roots modulo p are lifted one power of p at a time. A nonsingular root (f' != 0 mod p) has a
    unique lift per step; a singular root is lifted by scanning its p candidate lifts.
    """
    if len(coeffs) - 1 > MAX_HENSEL_DEGREE:
        raise InvalidParameters(f"degree {len(coeffs) - 1} exceeds {MAX_HENSEL_DEGREE}")
    if m.value > MAX_HENSEL_MODULUS:
        raise InvalidParameters(f"modulus {m} exceeds the Hensel cap 2^30")
    p = m.p
    f = _to_dense(coeffs, m.value)
    if not f:
        raise ZeroPolynomial(f"all coefficients vanish modulo {m}")

    f_mod_p = _to_dense(coeffs, p)
    df_mod_p = gf_diff(f_mod_p, p, ZZ) if f_mod_p else []
    roots = [x for x in range(p) if gf_eval(f, x, p, ZZ) == 0]

    modulus = p
    for _ in range(1, m.k):
        next_modulus = modulus * p
        lifted = []
        for x in roots:
            slope = gf_eval(df_mod_p, x % p, p, ZZ) if df_mod_p else 0
            if slope:
                t = (-(int(gf_eval(f, x, next_modulus, ZZ)) // modulus) * mod_inverse(slope, p)) % p
                lifted.append(x + t * modulus)
            else:
                lifted.extend(
                    y for y in (x + j * modulus for j in range(p)) if gf_eval(f, y, next_modulus, ZZ) == 0
                )
        roots = lifted
        modulus = next_modulus

    logger.debug(f"hensel_roots: {len(roots)} roots modulo {m}")
    return sorted(int(x) for x in roots)


def exhaustive_roots(coeffs: Sequence[int], modulus: int) -> list[int]:
    """Roots of f modulo an arbitrary modulus by scanning every residue."""
    f = _to_dense(coeffs, modulus)
    if not f:
        raise ZeroPolynomial(f"all coefficients vanish modulo {modulus}")
    return [x for x in range(modulus) if gf_eval(f, x, modulus, ZZ) == 0]
