"""
Analytic kernels of the delta method: bump weights, the integrals I, J-pm and K, the Mellin
transform of V and the GL(3) Voronoi Gamma kernel.

Single integrals go through scipy.integrate.quad (oscillatory weights where they apply). J-pm and
K work on fixed grids: t = log y for the Mellin side, a truncated tau line for the Gamma kernel,
Gauss-Legendre panels in zeta.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import mpmath
import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import loggamma

from sumlab.circle_method import delta_modulus
from sumlab.errors import InvalidParameters, NearPole, QuadratureFailure
from sumlab.values import MACHINE_EPS, SumValue

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10
QUAD_LIMIT = 400
QUAD_FAILURE = 1e-8

POLE_DISTANCE = 1e-6

LOG_NODES = 513
Y_NODES = 4097
TAU_STEP = 0.04
T_START = 64.0
T_MAX_FLOOR = 8192.0
T_MAX_FACTOR = 8.0
LOG_OVERSAMPLING = 1.5
TAIL_TOL = 1e-8
TAU_CHUNK = 2048
ZETA_CHUNK = 1024

GL_NODES = 24
CYCLES_PER_PANEL = 2.0
MIN_MARGIN = 64.0

ArrayLike = Union[float, np.ndarray]


def _bump_profile(x: np.ndarray) -> np.ndarray:
    """exp(-1/x) for x > 0, 0 otherwise."""
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = np.exp(-1.0 / x[positive])
    return out


def smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    rise = _bump_profile(x)
    return rise / (rise + _bump_profile(1.0 - x))


@dataclass(frozen=True)
class BumpWeight:
    """
    Smooth weight supported in [c, d].

    With a plateau [l, u] the weight is 1 there and joins 0 through smooth steps; without one it is
    the peak exp(1 - 1/(1 - x^2)) centred in [c, d], equal to 1 at the centre.
    """

    support: tuple[float, float]
    plateau: Optional[tuple[float, float]] = None

    def __post_init__(self):
        c, d = self.support
        if not 0 < c < d:
            raise InvalidParameters(f"support must satisfy 0 < c < d, got {self.support}")
        if self.plateau is not None:
            lo, hi = self.plateau
            if not c < lo <= hi < d:
                raise InvalidParameters(f"plateau {self.plateau} must lie strictly inside {self.support}")

    def __call__(self, y: ArrayLike) -> ArrayLike:
        scalar = np.ndim(y) == 0
        y = np.atleast_1d(np.asarray(y, dtype=float))
        c, d = self.support
        if self.plateau is None:
            x = (y - (c + d) / 2) / ((d - c) / 2)
            inside = np.abs(x) < 1
            values = np.zeros_like(y)
            values[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        else:
            lo, hi = self.plateau
            values = smooth_step((y - c) / (lo - c)) * smooth_step((d - y) / (d - hi))
        return float(values[0]) if scalar else values

    def mass(self) -> float:
        value, _ = quad(self, *self.support, epsabs=QUAD_TOL, limit=QUAD_LIMIT)
        return value

    def derivative_l1(self, order: int, nodes: int = 20001) -> float:
        """L1 norm of the order-th derivative, by finite differences on a uniform grid."""
        y = np.linspace(*self.support, nodes)
        values = self(y)
        for _ in range(order):
            values = np.gradient(values, y)
        return float(np.trapezoid(np.abs(values), y))


U_WEIGHT = BumpWeight((0.5, 2.5), plateau=(1.0, 2.0))
V_WEIGHT = BumpWeight((1.0, 2.0))


@dataclass(frozen=True)
class LanglandsParams:
    values: tuple[complex, complex, complex] = (0j, 0j, 0j)

    def __post_init__(self):
        if abs(sum(self.values)) > 1e-12:
            raise InvalidParameters(f"Langlands parameters must sum to 0, got {self.values}")


def sample_triples(theta: float = 1.5) -> list[LanglandsParams]:
    """mu = 0 plus two purely imaginary triples summing to 0."""
    return [
        LanglandsParams(),
        LanglandsParams((2j * theta, -1j * theta, -1j * theta)),
        LanglandsParams((1j * theta, 0j, -1j * theta)),
    ]


@dataclass(frozen=True)
class KernelSetup:
    """Scale N, the prime power data and the weights the kernels are built from."""

    N: float
    p: int
    kappa: int
    lam: int
    mu: LanglandsParams = field(default_factory=LanglandsParams)
    sign: int = 1
    U: BumpWeight = U_WEIGHT
    V: BumpWeight = V_WEIGHT

    def __post_init__(self):
        if self.N <= 0 or not 1 <= self.lam < self.kappa:
            raise InvalidParameters(f"need N > 0 and 1 <= lambda < kappa, got {self}")
        if self.sign not in (1, -1):
            raise InvalidParameters(f"sign must be +1 or -1, got {self.sign}")

    @property
    def Q(self) -> float:
        return delta_modulus(self.N, self.p, self.lam)

    def frequency(self, a: int, q: int) -> float:
        """N / (a q p^lambda): the rate at which zeta enters both integrals."""
        return self.N / (a * q * self.p**self.lam)

    def omega(self, m: int, a: int, q: int, zeta: ArrayLike) -> ArrayLike:
        return zeta * self.frequency(a, q) - m * self.N / (q * self.p**self.kappa)

    def center(self, m: int, a: int) -> float:
        """zeta at which omega vanishes: m a / p^(kappa - lambda)."""
        return m * a / self.p ** (self.kappa - self.lam)


def _quad_checked(func, lo: float, hi: float, **kwargs) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error = quad(func, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT, **kwargs)
    if not math.isfinite(value) or error > QUAD_FAILURE:
        raise QuadratureFailure(f"quad reached error {error:.3g} on [{lo}, {hi}]")
    return value, error


def fourier_weight(weight: BumpWeight, omega: float) -> SumValue:
    """Integral of weight(y) e(omega y) dy."""
    lo, hi = weight.support
    if omega == 0:
        value, error = _quad_checked(weight, lo, hi)
        return SumValue(complex(value), error)
    frequency = 2 * math.pi * omega
    real, real_error = _quad_checked(weight, lo, hi, weight="cos", wvar=frequency)
    imag, imag_error = _quad_checked(weight, lo, hi, weight="sin", wvar=frequency)
    return SumValue(complex(real, imag), real_error + imag_error)


def integral_I(m: int, a: int, q: int, zeta: float, setup: KernelSetup) -> SumValue:
    """Integral of U(y) e(zeta N y / (a q p^lambda)) e(-m N y / (q p^kappa)) dy."""
    if a < 1 or q < 1:
        raise InvalidParameters(f"a and q must be >= 1, got a={a}, q={q}")
    return fourier_weight(setup.U, setup.omega(m, a, q, zeta))


def integration_by_parts_bound(omega: float, weight: BumpWeight = U_WEIGHT, times: int = 2) -> float:
    """|int weight(y) e(omega y) dy| <= int |weight^(j)| / (2 pi |omega|)^j."""
    if omega == 0:
        return math.inf
    return weight.derivative_l1(times) / (2 * math.pi * abs(omega)) ** times


def mellin_V(r: float, s: complex, V: BumpWeight = V_WEIGHT) -> SumValue:
    """Integral of V(y) e(-r y) y^(s-1) dy over the support of V."""
    s = complex(s)

    def integrand(y: float) -> complex:
        return V(y) * np.exp(-2j * math.pi * r * y + (s - 1) * math.log(y))

    lo, hi = V.support
    real, real_error = _quad_checked(lambda y: integrand(y).real, lo, hi)
    imag, imag_error = _quad_checked(lambda y: integrand(y).imag, lo, hi)
    return SumValue(complex(real, imag), real_error + imag_error)


def mellin_V_mpmath(r: float, s: complex, V: BumpWeight = V_WEIGHT, pieces: int = 16) -> complex:
    """Independent Mellin transform through mpmath's tanh-sinh quadrature on subintervals."""
    s = mpmath.mpc(complex(s))

    def integrand(y):
        return V(float(y)) * mpmath.expj(-2 * mpmath.pi * r * y) * mpmath.power(y, s - 1)

    lo, hi = V.support
    return complex(mpmath.quad(integrand, mpmath.linspace(lo, hi, pieces + 1)))


def mellin_decay_bound(tau: float, V: BumpWeight = V_WEIGHT) -> float:
    """
    Second derivative test for the Mellin transform at s = 1/2 - i tau.

    The phase -2 pi r y - tau log y has second derivative tau / y^2 >= tau / d^2 on [c, d], so
    |V~(r, 1/2 - i tau)| <= 8 d / sqrt(tau) * int |(V(y) y^(-1/2))'| dy for every r.
    """
    lo, hi = V.support
    y = np.linspace(lo, hi, 20001)
    slope = np.gradient(V(y) / np.sqrt(y), y)
    return 8 * hi / math.sqrt(abs(tau)) * float(np.trapezoid(np.abs(slope), y))


def _nonpositive_integer_distance(z: complex) -> float:
    n = round(z.real)
    if n > 0:
        return math.inf
    return abs(z - n)


def gamma_pm(s: complex, mu: LanglandsParams = LanglandsParams(), sign: int = 1) -> complex:
    """
    1 / (2 pi^(3(s+1/2))) * (prod Gamma((1+s+mu_j)/2) / Gamma((-s-mu_j)/2)
                             -+ i prod Gamma((2+s+mu_j)/2) / Gamma((1-s-mu_j)/2)).

    A product whose denominator sits on a pole of Gamma is 0.
    """
    s = complex(s)
    for m in mu.values:
        for z in ((1 + s + m) / 2, (2 + s + m) / 2):
            if _nonpositive_integer_distance(z) < POLE_DISTANCE / 2:
                raise NearPole(f"s = {s} is within {POLE_DISTANCE} of a pole for mu = {m}")
    products = []
    for shift in (0, 1):
        numerators = [(1 + shift + s + m) / 2 for m in mu.values]
        denominators = [(shift - s - m) / 2 for m in mu.values]
        if any(_nonpositive_integer_distance(z) < 1e-14 for z in denominators):
            products.append(0j)
            continue
        log_ratio = sum(loggamma(z) for z in numerators) - sum(loggamma(z) for z in denominators)
        products.append(complex(np.exp(log_ratio)))
    prefactor = 0.5 * np.exp(-3 * (s + 0.5) * math.log(math.pi))
    return complex(prefactor * (products[0] - sign * 1j * products[1]))


def _gamma_line(taus: np.ndarray, mu: LanglandsParams, sign: int) -> np.ndarray:
    """gamma_pm(-1/2 + i tau) over an array, off every pole when Re mu_j = 0."""
    s = -0.5 + 1j * np.asarray(taus, dtype=float)
    first = sum(loggamma((1 + s + m) / 2) - loggamma((-s - m) / 2) for m in mu.values)
    second = sum(loggamma((2 + s + m) / 2) - loggamma((1 - s - m) / 2) for m in mu.values)
    return 0.5 * (np.exp(first) - sign * 1j * np.exp(second))


def gamma_growth_ratio(sigma: float, tau: float, mu: LanglandsParams = LanglandsParams(), sign: int = 1) -> float:
    """|gamma_pm(sigma + i tau)| / (1 + |tau|)^(3 (sigma + 1/2))."""
    return abs(gamma_pm(complex(sigma, tau), mu, sign)) / (1 + abs(tau)) ** (3 * (sigma + 0.5))


@lru_cache(maxsize=8)
def _log_profile(V: BumpWeight, nodes: int = LOG_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Nodes t = log y over the support of V and trapezoid-weighted V(e^t) e^(t/2)."""
    lo, hi = V.support
    t = np.linspace(math.log(lo), math.log(hi), nodes)
    weights = np.full(nodes, t[1] - t[0])
    weights[0] = weights[-1] = weights[0] / 2
    profile = weights * V(np.exp(t)) * np.exp(t / 2)
    t.flags.writeable = False
    profile.flags.writeable = False
    return t, profile


def _bandwidth(T: float, rs: np.ndarray, V: BumpWeight) -> float:
    """Largest phase rate in t of the tau line up to T times e(-r e^t)."""
    return T + 2 * math.pi * V.support[1] * float(np.max(np.abs(rs)))


def log_nodes(bandwidth: float, V: BumpWeight) -> int:
    """t-grid size resolving phases that turn at most bandwidth radians per unit of t."""
    lo, hi = V.support
    needed = math.ceil(LOG_OVERSAMPLING * math.log(hi / lo) * bandwidth / math.pi) + 1
    return max(LOG_NODES, needed)


def _phased_profile(rs: np.ndarray, V: BumpWeight, nodes: int = LOG_NODES) -> np.ndarray:
    """Rows V(e^t) e^(t/2) e(-r e^t) dt for each r."""
    t, profile = _log_profile(V, nodes)
    return profile[None, :] * np.exp(-2j * np.pi * np.outer(rs, np.exp(t)))


def mellin_V_grid(
    rs: np.ndarray, taus: np.ndarray, V: BumpWeight = V_WEIGHT, nodes: Optional[int] = None
) -> np.ndarray:
    """
    V~(r, 1/2 - i tau) for every r in rs and tau in taus, shape (len(rs), len(taus)).

    The default grid resolves the largest |tau| and |r| asked for.
    """
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if nodes is None:
        nodes = log_nodes(_bandwidth(float(np.max(np.abs(taus))), rs, V), V)
    t, _ = _log_profile(V, nodes)
    rows = _phased_profile(rs, V, nodes)
    out = np.empty((rs.size, taus.size), dtype=complex)
    for start in range(0, taus.size, TAU_CHUNK):
        chunk = taus[start : start + TAU_CHUNK]
        phases = np.exp(-1j * np.outer(t, chunk))
        out[:, start : start + chunk.size] = rows @ phases
    return out


def j_pm_integrand(tau: float, y: float, a: int, q: int, zeta: float, setup: KernelSetup) -> complex:
    """(N y)^(-i tau) gamma_pm(-1/2 + i tau) V~(zeta N / (a q p^lambda), 1/2 - i tau) / (2 pi)."""
    r = zeta * setup.frequency(a, q)
    mellin = mellin_V_grid(np.array([r]), np.array([tau]), setup.V)[0, 0]
    gamma = _gamma_line(np.array([tau]), setup.mu, setup.sign)[0]
    return complex(np.exp(-1j * tau * math.log(setup.N * y)) * gamma * mellin / (2 * math.pi))


def _tail_size(T: float, rs: np.ndarray, setup: KernelSetup) -> float:
    """Crude bound for the part of the tau integral beyond +-T."""
    edge = np.linspace(T, 1.5 * T, 33)
    taus = np.concatenate([edge, -edge])
    sample = np.unique(np.concatenate([[rs.min(), rs.max()], np.linspace(rs.min(), rs.max(), 9)]))
    size = np.abs(mellin_V_grid(sample, taus, setup.V)) * np.abs(_gamma_line(taus, setup.mu, setup.sign))[None, :]
    return float(np.max(size)) * T / math.pi


def truncation_point(rs: np.ndarray, setup: KernelSetup, tol: float = TAIL_TOL) -> tuple[float, float]:
    """
    Smallest T = T0 * 2^j past every stationary point with tail below tol, and that tail.

    T0 = T_START + 2 pi d max|r| and the doubling stops at max(T_MAX_FLOOR, T_MAX_FACTOR * T0).
    """
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    T = _bandwidth(T_START, rs, setup.V)
    cap = max(T_MAX_FLOOR, T_MAX_FACTOR * T)
    tail = _tail_size(T, rs, setup)
    while tail > tol:
        T *= 2
        if T > cap:
            raise QuadratureFailure(f"tau tail {tail:.3g} still above {tol} at T = {cap:g}")
        tail = _tail_size(T, rs, setup)
    logger.debug(f"truncation_point: T = {T}, tail = {tail:.3g}")
    return T, tail


@lru_cache(maxsize=16)
def _tau_kernel(
    log_ny: float, T: float, step: float, mu: LanglandsParams, sign: int, V: BumpWeight, nodes: int
) -> np.ndarray:
    """H(t) = step / (2 pi) * sum_j w_j gamma(-1/2 + i tau_j) e^(-i tau_j (t + log N y)) on the t-grid."""
    t, _ = _log_profile(V, nodes)
    count = int(round(T / step))
    taus = step * np.arange(-count, count + 1)
    coefficients = _gamma_line(taus, mu, sign) * (step / (2 * math.pi))
    coefficients[0] /= 2
    coefficients[-1] /= 2
    shifted = t + log_ny
    kernel = np.zeros(t.size, dtype=complex)
    for start in range(0, taus.size, TAU_CHUNK):
        chunk = slice(start, start + TAU_CHUNK)
        kernel += np.sum(np.exp(-1j * np.outer(shifted, taus[chunk])) * coefficients[None, chunk], axis=1)
    kernel.flags.writeable = False
    return kernel


def _j_pm_values(
    y: float, rs: np.ndarray, setup: KernelSetup, truncation: Optional[float], step: float
) -> tuple[np.ndarray, float, int]:
    """J-pm values for every r, the tau tail and the number of (tau, t) terms."""
    if truncation is None:
        T, tail = truncation_point(rs, setup)
    else:
        T, tail = truncation, 0.0
    nodes = log_nodes(_bandwidth(T, rs, setup.V), setup.V)
    kernel = _tau_kernel(math.log(setup.N * y), T, step, setup.mu, setup.sign, setup.V, nodes)
    values = np.empty(rs.size, dtype=complex)
    for start in range(0, rs.size, ZETA_CHUNK):
        chunk = slice(start, start + ZETA_CHUNK)
        values[chunk] = np.sum(_phased_profile(rs[chunk], setup.V, nodes) * kernel[None, :], axis=1)
    return values, tail, (2 * int(round(T / step)) + 1) * nodes


def integral_J_pm(
    y: float,
    a: int,
    q: int,
    zeta: float,
    setup: KernelSetup,
    truncation: Optional[float] = None,
    step: float = TAU_STEP,
) -> SumValue:
    """
    (1 / 2 pi) * integral over tau of (N y)^(-i tau) gamma_pm(-1/2 + i tau) V~(zeta N / (a q p^lambda), 1/2 - i tau).

    The tau line is cut at T (adaptive unless given) and sampled with the trapezoid rule.
    """
    if y <= 0:
        raise InvalidParameters(f"y must be positive, got {y}")
    rs = np.array([zeta * setup.frequency(a, q)])
    values, tail, count = _j_pm_values(y, rs, setup, truncation, step)
    return SumValue(complex(values[0]), tail + MACHINE_EPS * count * max(abs(values[0]), 1.0))


def _fourier_weight_grid(weight: BumpWeight, omegas: np.ndarray) -> np.ndarray:
    """Trapezoid values of int weight(y) e(omega y) dy for an array of omegas."""
    y = np.linspace(*weight.support, Y_NODES)
    weights = np.full(Y_NODES, y[1] - y[0])
    weights[0] = weights[-1] = weights[0] / 2
    profile = weights * weight(y)
    out = np.empty(omegas.size, dtype=complex)
    for start in range(0, omegas.size, ZETA_CHUNK):
        chunk = omegas[start : start + ZETA_CHUNK]
        out[start : start + chunk.size] = np.sum(profile[None, :] * np.exp(2j * np.pi * np.outer(chunk, y)), axis=1)
    return out


def _panels(lo: float, hi: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lo, hi] with count equal panels."""
    base, base_weights = np.polynomial.legendre.leggauss(GL_NODES)
    edges = np.linspace(lo, hi, count + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * base[None, :]).ravel()
    weights = (half[:, None] * base_weights[None, :]).ravel()
    return nodes, weights


def zeta_margin(q: int, setup: KernelSetup) -> float:
    """(log q p^kappa)^2, floored at MIN_MARGIN, as a multiple of 1 / frequency."""
    return max(math.log(q * setup.p**setup.kappa) ** 2, MIN_MARGIN)


def zeta_nodes(m: int, a: int, q: int, setup: KernelSetup, refine: bool) -> tuple[np.ndarray, np.ndarray]:
    """
    Quadrature nodes for the zeta-integral over [0, 1].

    Panels resolve the oscillation rate of the integrand. With refine the resolution is kept only on
    the window where I is not negligible, |zeta - m a / p^(kappa-lambda)| <= margin / frequency,
    and the rest of [0, 1] gets one panel per side.
    """
    frequency = setup.frequency(a, q)
    rate = (setup.U.support[1] + setup.V.support[1]) * frequency

    def resolved(lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        return _panels(lo, hi, max(1, math.ceil(rate * (hi - lo) / CYCLES_PER_PANEL)))

    if not refine:
        return resolved(0.0, 1.0)
    center = setup.center(m, a)
    width = zeta_margin(q, setup) / frequency
    lo, hi = max(0.0, center - width), min(1.0, center + width)
    if lo >= hi:
        return _panels(0.0, 1.0, 1)
    parts = [resolved(lo, hi)]
    if lo > 0:
        parts.append(_panels(0.0, lo, 1))
    if hi < 1:
        parts.append(_panels(hi, 1.0, 1))
    return np.concatenate([n for n, _ in parts]), np.concatenate([w for _, w in parts])


def integral_K(
    m: int, y: float, a: int, q: int, setup: KernelSetup, refine: bool = True, step: float = TAU_STEP
) -> SumValue:
    """Integral over zeta in [0, 1] of I(m, a, q, zeta) J-pm(y, a, q, zeta)."""
    nodes, weights = zeta_nodes(m, a, q, setup, refine)
    first = _fourier_weight_grid(setup.U, setup.omega(m, a, q, nodes))
    second, tail, _ = _j_pm_values(y, nodes * setup.frequency(a, q), setup, None, step)
    terms = weights * first * second
    mass = setup.U.mass()
    return SumValue.from_array(terms, inherited=tail * mass)
