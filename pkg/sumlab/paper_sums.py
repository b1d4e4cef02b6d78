"""
Composite character sums modulo q * p^kappa and the structural claims made about them.

Every sum has a direct transcription that serves as the oracle, and a structural evaluation:
the Poisson closed form of the A-sum, the CRT split of the C* and B* sums into a q-part and a
p-part, the p-part with the Kloosterman sums opened and summed over b (semi form), and the p-part
reduced to counting solutions of a congruence system through the Postnikov parameter (fast form).

The verify_* and check_* functions evaluate a parameter tuple along several of these paths and
return a TupleCheck listing every claim with its pass flag. Claims marked non-gating are recorded
for the report only.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

import numpy as np
from sympy import divisor_count, isprime

from sumlab.characters import DirichletCharacter, gauss_sum, is_primitive, postnikov_eta
from sumlab.classic_sums import kloosterman_sum, ramanujan_closed
from sumlab.errors import (
    InvalidParameters,
    NonInvertibleWitness,
    NotDivisible,
    NotInvertible,
    NotPrimitive,
    PreconditionViolated,
)
from sumlab.modarith import PrimePowerModulus, exhaustive_roots, hensel_roots, mod_inverse, p_adic_split, valuation
from sumlab.report import Claim, TupleCheck, agreement_claim, bound_claim, vanishing_claim
from sumlab.values import SumAccumulator, SumValue, unit_root, unit_roots

logger = logging.getLogger(__name__)

QUINTIC_ROOT_LIMIT = 5
B2_RESIDUE_LIMIT = 10
QUINTIC_LADDER_TERMS = 200_000
LEMMA6_ROOT_CONSTANT = 10


@dataclass(frozen=True)
class AParams:
    m: int
    a: int
    b: int
    q: int
    kappa: int
    lam: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidParameters(f"q must be >= 1, got {self.q}")
        if math.gcd(self.a, self.q) != 1:
            raise InvalidParameters(f"a = {self.a} is not coprime to q = {self.q}")
        if not 1 <= self.lam < self.kappa:
            raise InvalidParameters(f"need 1 <= lambda < kappa, got lambda={self.lam}, kappa={self.kappa}")


def _check_common(
    p: int, kappa: int, lam: int, m1: int, m2: int, a1: int, a2: int, q1: int, q2: int, n1p: int, sign: int
):
    if p < 3 or not isprime(p):
        raise InvalidParameters(f"p must be an odd prime, got {p}")
    if not 1 <= lam < kappa:
        raise InvalidParameters(f"need 1 <= lambda < kappa, got lambda={lam}, kappa={kappa}")
    if q1 < 1 or q2 < 1 or math.gcd(q1 * q2, p) != 1:
        raise InvalidParameters(f"q1 = {q1}, q2 = {q2} must be positive and coprime to {p}")
    if n1p < 1 or q1 % n1p or q2 % n1p:
        raise InvalidParameters(f"n1' = {n1p} must divide q1 = {q1} and q2 = {q2}")
    if m1 == 0 or m2 == 0:
        raise InvalidParameters("m1 and m2 must be nonzero")
    for m, a, q in ((m1, a1, q1), (m2, a2, q2)):
        if math.gcd(a, q) != 1 or math.gcd(m, q) != 1:
            raise InvalidParameters(f"a = {a} and m = {m} must be coprime to q = {q}")
    if sign not in (1, -1):
        raise InvalidParameters(f"sign must be +1 or -1, got {sign}")


@dataclass(frozen=True)
class CStarParams:
    p: int
    kappa: int
    lam: int
    r: int
    m1: int
    m2: int
    a1: int
    a2: int
    q1: int
    q2: int
    n1p: int
    n1pp: int
    n2: int
    sign: int = 1

    def __post_init__(self):
        _check_common(
            self.p, self.kappa, self.lam, self.m1, self.m2, self.a1, self.a2, self.q1, self.q2, self.n1p, self.sign
        )
        if not 0 <= self.r <= self.lam:
            raise InvalidParameters(f"need 0 <= r <= lambda, got r={self.r}")
        if self.n1pp < 1 or self.p**self.depth % self.n1pp:
            raise InvalidParameters(f"n1'' = {self.n1pp} must divide {self.p}^{self.depth}")

    @property
    def depth(self) -> int:
        """lambda - r, the p-adic length of the c-sums."""
        return self.lam - self.r

    @property
    def alpha(self) -> int:
        return self.depth // 2

    @property
    def delta(self) -> int:
        return self.depth % 2

    @property
    def q1_hat(self) -> int:
        return self.q1 // self.n1p

    @property
    def q2_hat(self) -> int:
        return self.q2 // self.n1p

    @property
    def p_hat(self) -> int:
        return self.p**self.depth // self.n1pp

    @property
    def signed_n2(self) -> int:
        return self.sign * self.n2

    @property
    def in_fast_domain(self) -> bool:
        return 3 * self.lam <= 2 * self.kappa and self.n1pp == 1 and self.depth >= 2


@dataclass(frozen=True)
class BStarParams:
    p: int
    kappa: int
    lam: int
    s: int
    m1: int
    m2: int
    a1: int
    a2: int
    q1: int
    q2: int
    n1p: int
    n1pp: int
    n2: int
    sign: int = 1

    def __post_init__(self):
        _check_common(
            self.p, self.kappa, self.lam, self.m1, self.m2, self.a1, self.a2, self.q1, self.q2, self.n1p, self.sign
        )
        if self.s < 1:
            raise InvalidParameters(f"s must be >= 1, got {self.s}")
        if self.kappa - self.lam < self.s:
            raise NotDivisible(f"kappa - lambda = {self.kappa - self.lam} is smaller than s = {self.s}")
        if self.m1 % self.p**self.s or self.m2 % self.p**self.s:
            raise NotDivisible(f"m1 = {self.m1} and m2 = {self.m2} must be divisible by {self.p}^{self.s}")
        if self.a1 % self.p == 0 or self.a2 % self.p == 0:
            raise InvalidParameters(f"a1 = {self.a1} and a2 = {self.a2} must be coprime to {self.p}")
        if self.n1pp < 1 or self.p ** (self.lam + self.s) % self.n1pp:
            raise InvalidParameters(f"n1'' = {self.n1pp} must divide {self.p}^{self.lam + self.s}")

    @property
    def alpha(self) -> int:
        return self.lam // 2

    @property
    def delta(self) -> int:
        return self.lam % 2

    @property
    def q1_hat(self) -> int:
        return self.q1 // self.n1p

    @property
    def q2_hat(self) -> int:
        return self.q2 // self.n1p

    @property
    def rho_hat(self) -> int:
        return self.p ** (self.lam + self.s) // self.n1pp

    @property
    def signed_n2(self) -> int:
        return self.sign * self.n2


SumParams = Union[CStarParams, BStarParams]


def _check_character(chi: DirichletCharacter, p: int, kappa: int):
    if chi.p != p or chi.kappa != kappa:
        raise InvalidParameters(f"character modulus {chi.modulus} does not match {p}^{kappa}")
    if not is_primitive(chi):
        raise NotPrimitive(f"character index {chi.index} mod {chi.modulus} is not primitive")


def _witness_inverse(x: int, modulus: int) -> int:
    try:
        return mod_inverse(x, modulus)
    except NotInvertible as e:
        raise NonInvertibleWitness(f"Kloosterman argument needs the inverse of {x} modulo {modulus}") from e


# ---------------------------------------------------------------------------
# A-sum
# ---------------------------------------------------------------------------


def _a_bar(params: AParams, a_bar: Optional[int]) -> int:
    return mod_inverse(params.a, params.q) if a_bar is None else a_bar


def sum_A_naive(chi: DirichletCharacter, params: AParams, a_bar: Optional[int] = None) -> SumValue:
    """Direct sum over beta mod q p^kappa of chi(beta) e((m - (a_bar + bq) p^(kappa-lambda)) beta / (q p^kappa))."""
    p, pk = chi.p, chi.modulus.value
    if chi.kappa != params.kappa:
        raise InvalidParameters(f"character modulus {chi.modulus} does not match kappa = {params.kappa}")
    modulus = params.q * pk
    shift = p ** (params.kappa - params.lam)
    x = (params.m - (_a_bar(params, a_bar) + params.b * params.q) * shift) % modulus
    beta = np.arange(modulus, dtype=np.int64)
    return SumValue.from_array(chi.table[beta % pk] * unit_roots(x * beta % modulus, modulus))


def sum_A_closed(chi: DirichletCharacter, params: AParams, a_bar: Optional[int] = None) -> SumValue:
    """q 1[m = a_bar p^(kappa-lambda) mod q] chi(q') chi-bar((m - (a_bar + bq) p^(kappa-lambda)) / p^s) tau_chi."""
    _check_character(chi, chi.p, params.kappa)
    p, q = chi.p, params.q
    s, q_prime = p_adic_split(q, p)
    shift = p ** (params.kappa - params.lam)
    a_bar = _a_bar(params, a_bar)
    if (params.m - a_bar * shift) % q:
        return SumValue.zero()
    y = params.m - (a_bar + params.b * q) * shift
    weight = q * chi(q_prime) * chi.bar(y // p**s)
    if weight == 0:
        return SumValue.zero()
    return gauss_sum(chi) * weight


# ---------------------------------------------------------------------------
# C_r and B_s
# ---------------------------------------------------------------------------


def varpi(q: int, r: int, lam: int, p: int, q_bar: Optional[int] = None) -> int:
    """(1 - q q_bar) / p^r with q_bar the inverse of q modulo p^lambda."""
    if r < 0:
        raise InvalidParameters(f"r must be >= 0, got {r}")
    if q_bar is None:
        q_bar = mod_inverse(q, p**lam)
    numerator = 1 - q * q_bar
    if numerator % p**r:
        raise NotDivisible(f"{p}^{r} does not divide 1 - {q}*{q_bar}")
    return numerator // p**r


def _c_residues(p: int, depth: int, modulus: int) -> list[tuple[int, int]]:
    """(c, c_bar) for c mod p^depth with c_bar the inverse of c mod modulus; all c when modulus = 1."""
    if modulus == 1:
        return [(c, 0) for c in range(p**depth)]
    return [(c, mod_inverse(c, modulus)) for c in range(p**depth) if c % p]


@lru_cache(maxsize=1 << 14)
def _c_part(chi: DirichletCharacter, m: int, n2: int, q_hat: int, p_hat: int, depth: int) -> SumValue:
    shift = chi.p ** (chi.kappa - depth)
    q_inv = mod_inverse(q_hat, p_hat)
    acc = SumAccumulator()
    for c, c_bar in _c_residues(chi.p, depth, p_hat):
        weight = chi.bar(m - c * shift)
        if weight:
            acc.add(kloosterman_sum(c_bar * q_inv, n2 * q_inv, p_hat) * weight)
    return acc.result()


def sum_C_r(
    chi: DirichletCharacter,
    m: int,
    n1p: int,
    n1pp: int,
    n2: int,
    a: int,
    q: int,
    r: int,
    lam: int,
    kappa: int,
    q_bar: Optional[int] = None,
) -> SumValue:
    """
    S(a (varpi p_hat)^-1, n2 p_hat^-1; q_hat)
    * sum_c chi-bar(m - c p^(kappa-lambda+r)) S(c_bar q_hat^-1, n2 q_hat^-1; p_hat)

    with q_hat = q / n1', p_hat = p^(lambda-r) / n1'' and c over residues mod p^(lambda-r) invertible mod p_hat.
    """
    p = chi.p
    if chi.kappa != kappa:
        raise InvalidParameters(f"character modulus {chi.modulus} does not match kappa = {kappa}")
    depth = lam - r
    if depth < 0 or depth >= kappa:
        raise InvalidParameters(f"need 0 <= lambda - r < kappa, got {depth}")
    if n1p < 1 or q % n1p or math.gcd(q, p) != 1:
        raise InvalidParameters(f"n1' = {n1p} must divide q = {q}, and q must be coprime to {p}")
    if n1pp < 1 or p**depth % n1pp:
        raise InvalidParameters(f"n1'' = {n1pp} must divide {p}^{depth}")
    q_hat = q // n1p
    p_hat = p**depth // n1pp
    w = varpi(q, r, lam, p, q_bar)
    head = kloosterman_sum(a * _witness_inverse(w * p_hat, q_hat), n2 * mod_inverse(p_hat, q_hat), q_hat)
    return head * _c_part(chi, m % chi.modulus.value, n2 % p_hat, q_hat % p_hat, p_hat, depth)


def _default_a_bar(a: int, q: int, p: int, lam: int, s: int) -> int:
    return mod_inverse(a, q * p ** (lam + s))


@lru_cache(maxsize=1 << 14)
def _b_part(
    chi: DirichletCharacter, m: int, a_bar: int, n2: int, q_hat: int, rho_hat: int, s: int, lam: int
) -> SumValue:
    p = chi.p
    ps = p**s
    shift = p ** (chi.kappa - lam)
    q_inv = mod_inverse(q_hat, rho_hat)
    acc = SumAccumulator()
    for b in range(p**lam):
        numerator = m - (a_bar + b * ps) * shift
        if numerator % ps:
            raise NotDivisible(f"{p}^{s} does not divide {numerator}")
        weight = chi.bar(numerator // ps)
        if weight:
            g_inv = mod_inverse(a_bar + b * ps, rho_hat)
            acc.add(kloosterman_sum(g_inv * q_inv, n2 * q_inv, rho_hat) * weight)
    return acc.result()


def sum_B_s(
    chi: DirichletCharacter,
    m: int,
    n1p: int,
    n1pp: int,
    n2: int,
    a: int,
    q: int,
    s: int,
    lam: int,
    kappa: int,
    a_bar: Optional[int] = None,
) -> SumValue:
    """
    S(a rho_hat^-1, n2 rho_hat^-1; q_hat) * sum_b chi-bar((m - (a_bar + b p^s) p^(kappa-lambda)) / p^s)
    S((a_bar + b p^s)^-1 q_hat^-1, n2 q_hat^-1; rho_hat), with rho_hat = p^(lambda+s) / n1''.
    """
    p = chi.p
    if chi.kappa != kappa:
        raise InvalidParameters(f"character modulus {chi.modulus} does not match kappa = {kappa}")
    if s < 1 or not 1 <= lam < kappa:
        raise InvalidParameters(f"need s >= 1 and 1 <= lambda < kappa, got s={s}, lambda={lam}")
    if n1p < 1 or q % n1p or math.gcd(q, p) != 1:
        raise InvalidParameters(f"n1' = {n1p} must divide q = {q}, and q must be coprime to {p}")
    if n1pp < 1 or p ** (lam + s) % n1pp:
        raise InvalidParameters(f"n1'' = {n1pp} must divide {p}^{lam + s}")
    if math.gcd(a, q * p) != 1:
        raise InvalidParameters(f"a = {a} must be coprime to q p = {q * p}")
    if a_bar is None:
        a_bar = _default_a_bar(a, q, p, lam, s)
    q_hat = q // n1p
    rho_hat = p ** (lam + s) // n1pp
    rho_inv = mod_inverse(rho_hat, q_hat)
    head = kloosterman_sum(a * rho_inv, n2 * rho_inv, q_hat)
    # the b-sum only sees m mod p^(kappa+s) and a_bar mod p^(lambda+s)
    tail = _b_part(
        chi,
        m % p ** (kappa + s),
        a_bar % p ** (lam + s),
        n2 % rho_hat,
        q_hat % rho_hat,
        rho_hat,
        s,
        lam,
    )
    return head * tail


# ---------------------------------------------------------------------------
# C* and its split
# ---------------------------------------------------------------------------


def sum_Cstar_naive(chi: DirichletCharacter, params: CStarParams) -> SumValue:
    """Sum over beta mod q1_hat q2_hat p_hat of C_r(m1, beta) conj(C_r(m2, beta)) e(+-n2 beta / modulus)."""
    _check_character(chi, params.p, params.kappa)
    modulus = params.q1_hat * params.q2_hat * params.p_hat
    acc = SumAccumulator()
    for beta in range(modulus):
        left = sum_C_r(
            chi, params.m1, params.n1p, params.n1pp, beta, params.a1, params.q1, params.r, params.lam, params.kappa
        )
        right = sum_C_r(
            chi, params.m2, params.n1p, params.n1pp, beta, params.a2, params.q2, params.r, params.lam, params.kappa
        )
        acc.add(left * right.conjugate() * unit_root(params.signed_n2 * beta, modulus))
    return acc.result()


def _q_split_sum(x1: int, x2: int, q1_hat: int, q2_hat: int, p_hat: int, n2: int) -> SumValue:
    """sum_b S(x1, b p_hat^-1; q1_hat) S(x2, b p_hat^-1; q2_hat) e(n2 p_hat^-1 b / (q1_hat q2_hat))."""
    modulus = q1_hat * q2_hat
    inv1, inv2 = mod_inverse(p_hat, q1_hat), mod_inverse(p_hat, q2_hat)
    inv = mod_inverse(p_hat, modulus)
    acc = SumAccumulator()
    for b in range(modulus):
        term = kloosterman_sum(x1, b * inv1, q1_hat) * kloosterman_sum(x2, b * inv2, q2_hat)
        acc.add(term * unit_root(n2 * inv * b, modulus))
    return acc.result()


def q_witnesses(params: CStarParams) -> tuple[int, int]:
    """x_i = a_i (varpi_i p_hat)^-1 mod q_i_hat, the first Kloosterman arguments of the q-part."""
    p, r, lam, p_hat = params.p, params.r, params.lam, params.p_hat
    x1 = params.a1 * _witness_inverse(varpi(params.q1, r, lam, p) * p_hat, params.q1_hat) % params.q1_hat
    x2 = params.a2 * _witness_inverse(varpi(params.q2, r, lam, p) * p_hat, params.q2_hat) % params.q2_hat
    return x1, x2


def sum_C1star(params: CStarParams) -> SumValue:
    x1, x2 = q_witnesses(params)
    return _q_split_sum(x1, x2, params.q1_hat, params.q2_hat, params.p_hat, params.signed_n2)


def sum_C2star(chi: DirichletCharacter, params: CStarParams) -> SumValue:
    """
    sum_b T1(b) T2(b) e((q1_hat q2_hat)^-1 b n2 / p_hat) where
    T1(b) = sum_c1 chi-bar(m1 - c1 p^K) S(c1_bar q1_hat^-1, b q1_hat^-1; p_hat) and T2 likewise with chi and m2.
    """
    _check_character(chi, params.p, params.kappa)
    p, depth, p_hat = params.p, params.depth, params.p_hat
    shift = p ** (params.kappa - depth)
    residues = _c_residues(p, depth, p_hat)
    q1_inv, q2_inv = mod_inverse(params.q1_hat, p_hat), mod_inverse(params.q2_hat, p_hat)
    twist = mod_inverse(params.q1_hat * params.q2_hat, p_hat) * params.signed_n2
    left_weights = [(c_bar, chi.bar(params.m1 - c * shift)) for c, c_bar in residues]
    right_weights = [(c_bar, chi(params.m2 - c * shift)) for c, c_bar in residues]

    acc = SumAccumulator()
    for b in range(p_hat):
        left, right = SumAccumulator(), SumAccumulator()
        for c_bar, weight in left_weights:
            if weight:
                left.add(kloosterman_sum(c_bar * q1_inv, b * q1_inv, p_hat) * weight)
        for c_bar, weight in right_weights:
            if weight:
                right.add(kloosterman_sum(c_bar * q2_inv, b * q2_inv, p_hat) * weight)
        acc.add(left.result() * right.result() * unit_root(twist * b, p_hat))
    return acc.result()


def split_Cstar(chi: DirichletCharacter, params: CStarParams) -> tuple[SumValue, SumValue]:
    return sum_C1star(params), sum_C2star(chi, params)


def sum_C2star_semi(chi: DirichletCharacter, params: CStarParams) -> SumValue:
    """
    p_hat * sum over units d mod p_hat with q1_hat + n2 d a unit of W1(d) W2(d), where
    W1(d) = sum_c1 chi-bar(m1 - c1 p^K) e(-q2_hat (q1_hat (q1_hat + n2 d) c1)^-1 d / p_hat) and
    W2(d) = sum_c2 chi(m2 - c2 p^K) e((q2_hat c2)^-1 d / p_hat).

    When p_hat | n2 the d-sum is a Ramanujan sum and is evaluated in closed form.
    """
    _check_character(chi, params.p, params.kappa)
    p, depth, p_hat = params.p, params.depth, params.p_hat
    q1_hat, q2_hat, n2 = params.q1_hat, params.q2_hat, params.signed_n2
    shift = p ** (params.kappa - depth)
    residues = _c_residues(p, depth, p_hat)
    c_bars = np.array([c_bar for _, c_bar in residues], dtype=np.int64)
    left = np.array([chi.bar(params.m1 - c * shift) for c, _ in residues])
    right = np.array([chi(params.m2 - c * shift) for c, _ in residues])
    q2_inv = mod_inverse(q2_hat, p_hat)

    acc = SumAccumulator()
    if n2 % p_hat == 0:
        first = (q2_hat * mod_inverse(q1_hat * q1_hat, p_hat) * c_bars) % p_hat
        second = (q2_inv * c_bars) % p_hat
        for i in np.flatnonzero(left):
            for j in np.flatnonzero(right):
                m0 = int(second[j] - first[i])
                acc.add(left[i] * right[j] * ramanujan_closed(m0, p_hat))
        return acc.result() * p_hat

    for d in range(p_hat):
        if p_hat > 1 and d % p == 0:
            continue
        outer = q1_hat + n2 * d
        if p_hat > 1 and outer % p == 0:
            continue
        k1 = -q2_hat * mod_inverse(q1_hat * outer, p_hat) * d
        k2 = q2_inv * d
        w1 = SumValue.from_array(left * unit_roots(k1 % p_hat * c_bars, p_hat))
        w2 = SumValue.from_array(right * unit_roots(k2 % p_hat * c_bars, p_hat))
        acc.add(w1 * w2)
    return acc.result() * p_hat


# ---------------------------------------------------------------------------
# Fast form: congruence counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CongruenceSystem:
    """Data of the three congruences mod p^alpha satisfied by (b2, h2, d2) mod p^(alpha+delta)."""

    p: int
    alpha: int
    delta: int
    q1_hat: int
    q2_hat: int
    m1: int
    m2: int
    n2: int
    eta: int

    @classmethod
    def of(cls, params: CStarParams, eta: int) -> "CongruenceSystem":
        return cls(
            params.p,
            params.alpha,
            params.delta,
            params.q1_hat,
            params.q2_hat,
            params.m1,
            params.m2,
            params.signed_n2,
            eta,
        )

    @property
    def p_alpha(self) -> int:
        return self.p**self.alpha

    @property
    def lift_modulus(self) -> int:
        return self.p ** (self.alpha + self.delta)

    def outer(self, d2: int) -> int:
        return self.q1_hat + self.n2 * d2

    def holds(self, b2: int, h2: int, d2: int) -> bool:
        """The three congruences exactly as stated, all inverses mod p^alpha."""
        pa = self.p_alpha
        D = self.outer(d2)
        if D % self.p == 0 or b2 % self.p == 0 or h2 % self.p == 0:
            return False

        def inv(x: int) -> int:
            return mod_inverse(x, pa)

        q1, q2 = self.q1_hat, self.q2_hat
        g = q1 * inv(h2) - q2 * q2 * inv(D) * inv(b2) + q2 * q2 * inv(D * D) * self.n2 * inv(b2) * d2
        c1 = inv(self.m1) * self.eta + q2 * inv(q1 * D * b2 * b2) * d2
        c2 = inv(self.m2) * self.eta + inv(q2 * h2 * h2) * d2
        return g % pa == 0 and c1 % pa == 0 and c2 % pa == 0

    def solutions(self) -> Iterator[tuple[int, int, int]]:
        """Solutions (b2, h2, d2) mod p^(alpha+delta): loop over (b2, d2), h2 is fixed mod p^alpha by G."""
        p, pa, lifts = self.p, self.p_alpha, self.lift_modulus
        m1_inv, m2_inv = mod_inverse(self.m1, pa), mod_inverse(self.m2, pa)
        q2_sq_inv = mod_inverse(self.q2_hat * self.q2_hat, pa)
        for b2 in range(lifts):
            if b2 % p == 0:
                continue
            for d2 in range(lifts):
                if d2 % p == 0:
                    continue
                D = self.outer(d2)
                if D % p == 0:
                    continue
                if (m1_inv * self.eta + self.q2_hat * mod_inverse(self.q1_hat * D * b2 * b2, pa) * d2) % pa:
                    continue
                h_base = b2 * D * D * q2_sq_inv % pa
                for t in range(lifts // pa):
                    h2 = h_base + t * pa
                    if (m2_inv * self.eta + mod_inverse(self.q2_hat * h2 * h2, pa) * d2) % pa == 0:
                        yield b2, h2, d2

    def scan(self) -> set[tuple[int, int, int]]:
        """Exhaustive scan over all unit triples; the oracle for solutions()."""
        lifts = self.lift_modulus
        units = [x for x in range(lifts) if x % self.p]
        return {(b2, h2, d2) for b2 in units for h2 in units for d2 in units if self.holds(b2, h2, d2)}


def sum_C2star_fast(chi: DirichletCharacter, params: CStarParams) -> SumValue:
    """p^(5 alpha + delta) times the sum of f(b2, h2, d2) over the solutions of the congruence system."""
    _check_character(chi, params.p, params.kappa)
    if not params.in_fast_domain:
        raise PreconditionViolated(
            f"fast form needs 3 lambda <= 2 kappa, n1'' = 1 and lambda - r >= 2, got {params}"
        )
    p, depth = params.p, params.depth
    if params.m1 % p == 0 or params.m2 % p == 0:
        return SumValue.zero()
    eta = postnikov_eta(chi, params.alpha).eta
    system = CongruenceSystem.of(params, eta)
    modulus = p**depth
    shift = p ** (params.kappa - depth)
    q1, q2 = params.q1_hat, params.q2_hat
    acc = SumAccumulator()
    for b2, h2, d2 in system.solutions():
        phase = (mod_inverse(q2 * h2, modulus) - q2 * mod_inverse(q1 * system.outer(d2) * b2, modulus)) * d2
        weight = chi.bar(params.m1 - b2 * shift) * chi(params.m2 - h2 * shift)
        acc.add(weight * unit_root(phase, modulus))
    return acc.result() * p ** (5 * params.alpha + params.delta)


def build_quintic(params: CStarParams, eta: int) -> list[int]:
    """
    Coefficients, lowest degree first, of
    A^5 u^5 + 4A^4 u^4 + 6A^3 u^3 + 4A^2 u^2 - AC u^2 + A u - C u  mod p^alpha,
    with A = m1^-1 eta q1_hat q2_hat^-1 and C = m2^-1 eta q1_hat^3 q2_hat^-3.
    """
    p, alpha = params.p, params.alpha
    k = valuation(params.signed_n2, p)
    if params.n2 == 0 or k >= alpha:
        raise PreconditionViolated(f"quintic needs n2 != 0 with valuation below alpha = {alpha}")
    pa = p**alpha
    q2_inv = mod_inverse(params.q2_hat, pa)
    A = mod_inverse(params.m1, pa) * eta * params.q1_hat * q2_inv % pa
    C = mod_inverse(params.m2, pa) * eta * params.q1_hat**3 * q2_inv**3 % pa
    return [0, (A - C) % pa, (4 * A**2 - A * C) % pa, 6 * A**3 % pa, 4 * A**4 % pa, A**5 % pa]


def count_quintic_roots(params: CStarParams, eta: int) -> list[int]:
    """Roots u of the quintic modulo p^alpha."""
    return hensel_roots(build_quintic(params, eta), PrimePowerModulus(params.p, params.alpha))


def _all_roots_simple(coeffs: list[int], p: int) -> bool:
    derivative = [i * c for i, c in enumerate(coeffs)][1:]
    for x in exhaustive_roots(coeffs, p):
        if sum(c * pow(x, i, p) for i, c in enumerate(derivative)) % p == 0:
            return False
    return True


def reduced_system_solutions(params: CStarParams, eta: int) -> set[tuple[int, int, int]]:
    """
    Exhaustive solutions (b2, h2, gamma) mod p^alpha of
    b2 = q2_hat^2 gamma^2 h2, gamma = q1_hat^-1 (1 + A n2 b2^2),
    gamma^-1 = q1_hat (1 - m2^-1 eta q1_hat^-1 q2_hat n2 h2^2).
    """
    p, pa = params.p, params.p**params.alpha
    n2 = params.signed_n2
    q1, q2 = params.q1_hat, params.q2_hat
    q1_inv = mod_inverse(q1, pa)
    A = mod_inverse(params.m1, pa) * eta * q1 * mod_inverse(q2, pa) % pa
    m2_inv = mod_inverse(params.m2, pa)
    units = [x for x in range(pa) if x % p]
    found = set()
    for b2 in units:
        gamma = q1_inv * (1 + A * n2 * b2 * b2) % pa
        if gamma % p == 0:
            continue
        for h2 in units:
            if (b2 - q2 * q2 * gamma * gamma * h2) % pa:
                continue
            if (mod_inverse(gamma, pa) - q1 * (1 - m2_inv * eta * q1_inv * q2 * n2 * h2 * h2)) % pa == 0:
                found.add((b2, h2, gamma))
    return found


def check_quintic(chi: DirichletCharacter, params: CStarParams, scale: float = 1.0) -> TupleCheck:
    """
    Root counting of the quintic against the congruence system it was derived from.

    On the fast domain, and when the semi form is cheap enough, the sum over the solutions is also
    compared with the semi form within scale times the combined budgets.
    """
    _check_character(chi, params.p, params.kappa)
    p, alpha = params.p, params.alpha
    pa = p**alpha
    eta = postnikov_eta(chi, alpha).eta
    coeffs = build_quintic(params, eta)
    roots = hensel_roots(coeffs, PrimePowerModulus(p, alpha))
    k = int(valuation(params.signed_n2, p))
    system = CongruenceSystem.of(params, eta)
    solutions = set(system.solutions())
    reduced = reduced_system_solutions(params, eta)
    root_set = set(roots)
    b2_residues = {b2 % p ** (alpha - k) for b2, _, _ in solutions}

    claims = [
        Claim("solutions_match_scan", solutions == system.scan()),
        Claim("hensel_matches_scan", roots == exhaustive_roots(coeffs, pa)),
        Claim(
            "solutions_give_roots",
            all(params.signed_n2 * b2 * b2 % pa in root_set for b2, _, _ in solutions),
        ),
        Claim(
            "solutions_solve_reduced_system",
            all((b2 % pa, h2 % pa, mod_inverse(system.outer(d2), pa)) in reduced for b2, h2, d2 in solutions),
        ),
        Claim("b2_residue_count", len(b2_residues) <= B2_RESIDUE_LIMIT, True, len(b2_residues), B2_RESIDUE_LIMIT),
    ]
    simple = _all_roots_simple(coeffs, p)
    claims.append(Claim("root_count", len(roots) <= QUINTIC_ROOT_LIMIT or not simple, simple, len(roots), 5))
    units = params.p_hat - params.p_hat // p
    if params.in_fast_domain and params.p_hat * units * units <= QUINTIC_LADDER_TERMS:
        fast = sum_C2star_fast(chi, params)
        claims.append(agreement_claim("fast_matches_semi", fast, sum_C2star_semi(chi, params), scale))
    note = None if simple else "quintic singular mod p; root count recorded only"
    return TupleCheck(
        oracle=SumValue.exact(len(roots)),
        fast=SumValue.exact(len(b2_residues)),
        bound=float(QUINTIC_ROOT_LIMIT),
        claims=claims,
        note=note,
    )


# ---------------------------------------------------------------------------
# B* and its split
# ---------------------------------------------------------------------------


def _b_a_bars(params: BStarParams) -> tuple[int, int]:
    p, lam, s = params.p, params.lam, params.s
    return _default_a_bar(params.a1, params.q1, p, lam, s), _default_a_bar(params.a2, params.q2, p, lam, s)


def sum_Bstar_naive(chi: DirichletCharacter, params: BStarParams) -> SumValue:
    """Sum over beta mod q1_hat q2_hat rho_hat of B_s(m1, beta) conj(B_s(m2, beta)) e(+-n2 beta / modulus)."""
    _check_character(chi, params.p, params.kappa)
    modulus = params.q1_hat * params.q2_hat * params.rho_hat
    acc = SumAccumulator()
    for beta in range(modulus):
        left = sum_B_s(
            chi, params.m1, params.n1p, params.n1pp, beta, params.a1, params.q1, params.s, params.lam, params.kappa
        )
        right = sum_B_s(
            chi, params.m2, params.n1p, params.n1pp, beta, params.a2, params.q2, params.s, params.lam, params.kappa
        )
        acc.add(left * right.conjugate() * unit_root(params.signed_n2 * beta, modulus))
    return acc.result()


def sum_B1star(params: BStarParams) -> SumValue:
    rho = params.rho_hat
    x1 = params.a1 * mod_inverse(rho, params.q1_hat)
    x2 = params.a2 * mod_inverse(rho, params.q2_hat)
    return _q_split_sum(x1, x2, params.q1_hat, params.q2_hat, rho, params.signed_n2)


def _g_residues(params: BStarParams, a_bar: int) -> list[tuple[int, int]]:
    """(c, (a_bar + c p^s)^-1 mod rho_hat) for c mod p^lambda."""
    ps, rho = params.p**params.s, params.rho_hat
    return [(c, mod_inverse(a_bar + c * ps, rho)) for c in range(params.p**params.lam)]


def _b_weights(params: BStarParams, m: int, a_bar: int) -> list[int]:
    """Arguments (m - (a_bar + c p^s) p^(kappa-lambda)) / p^s for c mod p^lambda."""
    ps = params.p**params.s
    shift = params.p ** (params.kappa - params.lam)
    numerators = [m - (a_bar + c * ps) * shift for c in range(params.p**params.lam)]
    if any(x % ps for x in numerators):
        raise NotDivisible(f"{params.p}^{params.s} does not divide every character argument")
    return [x // ps for x in numerators]


def sum_B2star(chi: DirichletCharacter, params: BStarParams) -> SumValue:
    _check_character(chi, params.p, params.kappa)
    rho = params.rho_hat
    a1_bar, a2_bar = _b_a_bars(params)
    q1_inv, q2_inv = mod_inverse(params.q1_hat, rho), mod_inverse(params.q2_hat, rho)
    twist = mod_inverse(params.q1_hat * params.q2_hat, rho) * params.signed_n2
    left_weights = [
        (g_inv, chi.bar(x))
        for (_, g_inv), x in zip(_g_residues(params, a1_bar), _b_weights(params, params.m1, a1_bar))
    ]
    right_weights = [
        (g_inv, chi(x))
        for (_, g_inv), x in zip(_g_residues(params, a2_bar), _b_weights(params, params.m2, a2_bar))
    ]
    acc = SumAccumulator()
    for b in range(rho):
        left, right = SumAccumulator(), SumAccumulator()
        for g_inv, weight in left_weights:
            if weight:
                left.add(kloosterman_sum(g_inv * q1_inv, b * q1_inv, rho) * weight)
        for g_inv, weight in right_weights:
            if weight:
                right.add(kloosterman_sum(g_inv * q2_inv, b * q2_inv, rho) * weight)
        acc.add(left.result() * right.result() * unit_root(twist * b, rho))
    return acc.result()


def split_Bstar(chi: DirichletCharacter, params: BStarParams) -> tuple[SumValue, SumValue]:
    return sum_B1star(params), sum_B2star(chi, params)


def sum_B2star_semi(chi: DirichletCharacter, params: BStarParams) -> SumValue:
    """The B-analogue of sum_C2star_semi, with c_bar replaced by (a_bar + c p^s)^-1 and c mod p^lambda."""
    _check_character(chi, params.p, params.kappa)
    p, rho = params.p, params.rho_hat
    q1_hat, q2_hat, n2 = params.q1_hat, params.q2_hat, params.signed_n2
    a1_bar, a2_bar = _b_a_bars(params)
    g1 = np.array([g for _, g in _g_residues(params, a1_bar)], dtype=np.int64)
    g2 = np.array([g for _, g in _g_residues(params, a2_bar)], dtype=np.int64)
    left = np.array([chi.bar(x) for x in _b_weights(params, params.m1, a1_bar)])
    right = np.array([chi(x) for x in _b_weights(params, params.m2, a2_bar)])
    q2_inv = mod_inverse(q2_hat, rho)

    acc = SumAccumulator()
    if n2 % rho == 0:
        first = (q2_hat * mod_inverse(q1_hat * q1_hat, rho) * g1) % rho
        second = (q2_inv * g2) % rho
        for i in np.flatnonzero(left):
            for j in np.flatnonzero(right):
                acc.add(left[i] * right[j] * ramanujan_closed(int(second[j] - first[i]), rho))
        return acc.result() * rho

    for d in range(rho):
        if rho > 1 and d % p == 0:
            continue
        outer = q1_hat + n2 * d
        if rho > 1 and outer % p == 0:
            continue
        k1 = -q2_hat * mod_inverse(q1_hat * outer, rho) * d
        k2 = q2_inv * d
        w1 = SumValue.from_array(left * unit_roots(k1 % rho * g1, rho))
        w2 = SumValue.from_array(right * unit_roots(k2 % rho * g2, rho))
        acc.add(w1 * w2)
    return acc.result() * rho


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_sum_A(chi: DirichletCharacter, params: AParams, scale: float = 1.0) -> TupleCheck:
    """Closed form against the direct sum, and the trivial size bound q p^(kappa/2)."""
    naive = sum_A_naive(chi, params)
    closed = sum_A_closed(chi, params)
    bound = params.q * chi.p ** (params.kappa / 2)
    claims = [agreement_claim("closed_form", naive, closed, scale), bound_claim("size", naive, bound, scale=scale)]
    return TupleCheck(oracle=naive, fast=closed, bound=bound, claims=claims)


def full_sum_bound(params: SumParams) -> float:
    """q1_hat q2_hat (q1_hat, q2_hat, n2) times the trivial p-part size."""
    q_part = params.q1_hat * params.q2_hat * math.gcd(params.q1_hat, params.q2_hat, params.n2)
    if isinstance(params, CStarParams):
        return float(q_part * params.p_hat**2 * params.p ** (2 * params.depth))
    return float(q_part * params.rho_hat**2 * params.p ** (2 * params.lam))


def check_cstar_split(chi: DirichletCharacter, params: CStarParams, scale: float = 1.0) -> TupleCheck:
    naive = sum_Cstar_naive(chi, params)
    c1, c2 = split_Cstar(chi, params)
    product = c1 * c2
    bound = full_sum_bound(params)
    claims = [
        agreement_claim("split_product", naive, product, scale),
        bound_claim("full_bound", naive, bound, gating=False, scale=scale),
    ]
    return TupleCheck(oracle=naive, fast=product, bound=bound, claims=claims)


def check_bstar_split(chi: DirichletCharacter, params: BStarParams, scale: float = 1.0) -> TupleCheck:
    naive = sum_Bstar_naive(chi, params)
    b1, b2 = split_Bstar(chi, params)
    product = b1 * b2
    bound = full_sum_bound(params)
    claims = [
        agreement_claim("split_product", naive, product, scale),
        bound_claim("full_bound", naive, bound, gating=False, scale=scale),
    ]
    return TupleCheck(oracle=naive, fast=product, bound=bound, claims=claims)


def verify_lemma5(params: SumParams, scale: float = 1.0) -> TupleCheck:
    """q-part claims: vanishing for n2 = 0 unless q1 = q2, the diagonal bound, and the general bound."""
    if isinstance(params, CStarParams):
        first = sum_C1star(params)
        x1, x2 = q_witnesses(params)
    else:
        first = sum_B1star(params)
        rho = params.rho_hat
        x1 = params.a1 * mod_inverse(rho, params.q1_hat) % params.q1_hat
        x2 = params.a2 * mod_inverse(rho, params.q2_hat) % params.q2_hat
    q1_hat, q2_hat, n2 = params.q1_hat, params.q2_hat, params.signed_n2
    general = float(q1_hat * q2_hat * math.gcd(q1_hat, q2_hat, n2))
    claims = [bound_claim("lemma5_general_bound", first, general, gating=False, scale=scale)]
    if n2 == 0 and params.q1 != params.q2:
        claims.append(vanishing_claim("lemma5_vanishing", first, scale))
    if n2 == 0 and params.q1 == params.q2:
        diagonal = float(q1_hat**2 * math.gcd(q1_hat, x1 - x2))
        claims.append(bound_claim("lemma5_diagonal_bound", first, diagonal, scale=scale))
    return TupleCheck(oracle=first, fast=None, bound=general, claims=claims)


def lemma6_bound(params: CStarParams) -> float:
    """
    The sharpest bound that applies.

    In the fast domain: p^(3 depth + delta) when v_p(n2) >= alpha, the root-counting bound otherwise.
    Elsewhere the two Weil factors.
    """
    p, depth, alpha, delta = params.p, params.depth, params.alpha, params.delta
    if params.n1pp == 1 and depth >= 2:
        k = valuation(params.signed_n2, p)
        if k >= alpha:
            return float(p ** (3 * depth + delta))
        return float(LEMMA6_ROOT_CONSTANT * p ** (5 * alpha + int(k) + 4 * delta))
    return float(int(divisor_count(params.p_hat)) ** 2 * params.p_hat**2 * p ** (2 * depth))


def verify_lemma6(
    chi: DirichletCharacter,
    params: CStarParams,
    scale: float = 1.0,
    with_semi: bool = True,
    with_fast: bool = True,
) -> TupleCheck:
    """Evaluation ladder, vanishing claims and explicit bounds for the p-part of C*."""
    if 3 * params.lam > 2 * params.kappa:
        raise PreconditionViolated(f"lemma 6 needs 3 lambda <= 2 kappa, got lambda={params.lam}, kappa={params.kappa}")
    p, depth, p_hat = params.p, params.depth, params.p_hat
    alpha, delta = params.alpha, params.delta
    n2 = params.signed_n2
    k = valuation(n2, p)

    first, second = split_Cstar(chi, params)
    claims = []
    fast = None
    if with_semi:
        semi = sum_C2star_semi(chi, params)
        claims.append(agreement_claim("semi_matches_split", semi, second, scale))
        fast = semi
    if with_fast and params.in_fast_domain:
        fast = sum_C2star_fast(chi, params)
        claims.append(agreement_claim("fast_matches_split", fast, second, scale))

    if depth >= 2 and params.n1pp in (p**depth, p ** (depth - 1)):
        claims.append(vanishing_claim("lemma6_2_vanishing", second, scale))
    if depth >= 2 and params.n1pp != 1 and p_hat >= p * p:
        claims.append(vanishing_claim("lemma6_3_n1pp_gate", second, scale))
    if depth >= 2 and params.n1pp == 1 and n2 == 0:
        balance = params.m1 * params.q1_hat**2 - params.m2 * params.q2_hat**2
        if balance % p**alpha:
            claims.append(vanishing_claim("lemma6_3_congruence_gate", second, scale))

    weil = float(int(divisor_count(p_hat)) ** 2 * p_hat**2 * p ** (2 * depth))
    claims.append(bound_claim("weil_bound", second, weil, scale=scale))
    if n2 == 0:
        claims.append(bound_claim("ramanujan_bound", second, 2.0 * p_hat * p ** (2 * depth), scale=scale))
    if params.n1pp == 1 and depth >= 2:
        if k >= alpha:
            claims.append(bound_claim("congruence_count_bound", second, float(p ** (3 * depth + delta)), scale=scale))
        if n2 != 0:
            root_bound = float(LEMMA6_ROOT_CONSTANT * p ** (5 * alpha + int(k) + 4 * delta))
            claims.append(bound_claim("root_count_bound", second, root_bound, scale=scale))
    claims.append(bound_claim("full_bound", first * second, full_sum_bound(params), gating=False, scale=scale))
    return TupleCheck(oracle=second, fast=fast, bound=lemma6_bound(params), claims=claims)


def verify_lemma7(
    chi: DirichletCharacter, params: BStarParams, scale: float = 1.0, with_naive: bool = True, with_semi: bool = True
) -> TupleCheck:
    """Split identity, vanishing gates and bounds for B*."""
    p, lam, s, rho = params.p, params.lam, params.s, params.rho_hat
    alpha, delta = params.alpha, params.delta
    n2 = params.signed_n2
    k = valuation(n2, p)

    first, second = split_Bstar(chi, params)
    product = first * second
    claims = []
    if with_naive:
        claims.append(agreement_claim("split_product", sum_Bstar_naive(chi, params), product, scale))
    fast = None
    if with_semi:
        fast = sum_B2star_semi(chi, params)
        claims.append(agreement_claim("semi_matches_split", fast, second, scale))

    if n2 == 0 and params.q1 != params.q2:
        claims.append(vanishing_claim("lemma5_vanishing", first, scale))
    if lam >= 2 and params.n1pp != 1:
        claims.append(vanishing_claim("lemma7_1_n1pp_gate", second, scale))
    if lam >= 2 and params.n1pp == 1 and n2 == 0:
        ps = p**s
        balance = params.q1_hat**2 * (params.m1 // ps) - params.q2_hat**2 * (params.m2 // ps)
        if balance % p**alpha:
            claims.append(vanishing_claim("lemma7_2_congruence_gate", second, scale))

    weil = float(int(divisor_count(rho)) ** 2 * rho**2 * p ** (2 * lam))
    claims.append(bound_claim("weil_bound", second, weil, scale=scale))
    if n2 == 0 and params.n1pp == 1:
        claims.append(bound_claim("ramanujan_bound", second, 2.0 * rho**2 * p**lam, scale=scale))
        if params.q1 == params.q2:
            target = params.q2_hat**2 * mod_inverse(params.q1_hat**2, p**s) * params.a1 - params.a2
            holds = product.vanishes(scale) or target % p**s == 0
            claims.append(Claim("lemma7_1_a_congruence", holds, gating=False))
    exponent = 5 * lam / 2 + 4 * s + min(k, alpha) + 3 * delta / 2
    claims.append(bound_claim("lemma7_2_bound", second, float(p**exponent), gating=False, scale=scale))
    claims.append(bound_claim("full_bound", product, full_sum_bound(params), gating=False, scale=scale))
    return TupleCheck(oracle=second, fast=fast, bound=weil, claims=claims)
