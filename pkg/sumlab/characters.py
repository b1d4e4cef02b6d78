"""
Dirichlet characters modulo p^kappa in index form, Gauss sums and the Postnikov parameter.

A character is stored as (primitive root g, index t): chi(g^j) = e(t*j / phi). Identities are
checked in index arithmetic; complex values only appear when a sum is evaluated.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from sumlab.errors import DepthTooLarge, IndexOutOfRange, InvalidParameters, NotPrimitive
from sumlab.modarith import PrimePowerModulus, discrete_log, primitive_root
from sumlab.values import SumValue, unit_root, unit_roots

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _log_table(value: int, g: int, phi: int) -> np.ndarray:
    """table[x] = j with g^j = x mod value, or -1 for non-units."""
    table = np.full(value, -1, dtype=np.int64)
    x = 1
    for j in range(phi):
        table[x] = j
        x = x * g % value
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: PrimePowerModulus
    generator: int
    index: int

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def kappa(self) -> int:
        return self.modulus.k

    @property
    def phi(self) -> int:
        return self.modulus.phi

    @cached_property
    def _logs(self) -> np.ndarray:
        return _log_table(self.modulus.value, self.generator, self.phi)

    def log(self, x: int) -> Optional[int]:
        """Discrete log of x to the base g, None when p | x."""
        j = int(self._logs[x % self.modulus.value])
        return None if j < 0 else j

    def index_of(self, x: int) -> Optional[int]:
        """k with chi(x) = e(k / phi), None when chi(x) = 0."""
        j = self.log(x)
        return None if j is None else self.index * j % self.phi

    def __call__(self, x: int) -> complex:
        k = self.index_of(x)
        return 0j if k is None else unit_root(k, self.phi)

    def bar(self, x: int) -> complex:
        """Complex conjugate chi-bar(x)."""
        k = self.index_of(x)
        return 0j if k is None else unit_root(-k, self.phi)

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, self.generator, (-self.index) % self.phi)

    @cached_property
    def table(self) -> np.ndarray:
        """chi(x) for x = 0 .. p^kappa - 1."""
        logs = self._logs
        values = unit_roots(self.index * np.where(logs < 0, 0, logs), self.phi)
        values[logs < 0] = 0
        values.flags.writeable = False
        return values


def char_from_index(modulus: PrimePowerModulus, t: int) -> DirichletCharacter:
    if not 0 <= t < modulus.phi:
        raise IndexOutOfRange(f"index {t} outside [0, {modulus.phi})")
    return DirichletCharacter(modulus, primitive_root(modulus), t)


def is_primitive(chi: DirichletCharacter) -> bool:
    """True iff chi is non-trivial on 1 + p^(kappa-1) Z."""
    if chi.kappa == 1:
        return chi.index != 0
    return chi.index_of(1 + chi.p ** (chi.kappa - 1)) != 0


def primitive_characters(modulus: PrimePowerModulus) -> list[DirichletCharacter]:
    g = primitive_root(modulus)
    chars = (DirichletCharacter(modulus, g, t) for t in range(modulus.phi))
    return [chi for chi in chars if is_primitive(chi)]


@lru_cache(maxsize=256)
def gauss_sum(chi: DirichletCharacter) -> SumValue:
    """tau_chi = sum of chi(beta) e(beta / p^kappa) by direct summation."""
    q = chi.modulus.value
    return SumValue.from_array(chi.table * unit_roots(np.arange(q), q))


@dataclass(frozen=True)
class PostnikovParameter:
    """chi(1 + z p^(kappa - alpha)) = e(eta z / p^alpha) for every z."""

    eta: int
    alpha: int


def postnikov_eta(chi: DirichletCharacter, alpha: int) -> PostnikovParameter:
    p, kappa = chi.p, chi.kappa
    if alpha < 1:
        raise InvalidParameters(f"depth alpha must be >= 1, got {alpha}")
    if 2 * alpha > kappa:
        raise DepthTooLarge(f"2*alpha = {2 * alpha} exceeds kappa = {kappa}")
    if not is_primitive(chi):
        raise NotPrimitive(f"character index {chi.index} mod {chi.modulus} is not primitive")

    p_alpha = p**alpha
    step = chi.phi // p_alpha
    j0 = discrete_log(chi.generator, 1 + p ** (kappa - alpha), chi.modulus)
    # 1 + p^(kappa-alpha) has order p^alpha, so its log is a multiple of phi / p^alpha
    eta = chi.index * (j0 // step) % p_alpha
    param = PostnikovParameter(eta, alpha)
    if not postnikov_holds(chi, param):
        raise NotPrimitive(f"linearization failed for index {chi.index} at depth {alpha}")
    logger.debug(f"postnikov_eta: modulus {chi.modulus}, index {chi.index}, alpha {alpha} -> eta {eta}")
    return param


def postnikov_holds(chi: DirichletCharacter, param: PostnikovParameter) -> bool:
    """Check the defining identity for every z mod p^alpha in index arithmetic."""
    p_alpha = chi.p**param.alpha
    step = chi.phi // p_alpha
    base = chi.p ** (chi.kappa - param.alpha)
    return all(chi.index_of(1 + z * base) == (param.eta * z % p_alpha) * step for z in range(p_alpha))
