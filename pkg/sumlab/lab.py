"""
Verification sweeps: turn a SweepSpec into parameter tuples, check each tuple and collect a report.

Each target builds a list of blocks. A block fixes the outer parameters (p, kappa, lambda, moduli, ...)
and lists the values of the inner axes. Tuples are the points of the concatenated block products; when
there are more than max_tuples of them a seeded sample is taken and kept in enumeration order, so a
spec always produces the same tuples in the same order. Blocks whose naive cost exceeds max_terms are
skipped with a warning.

Tuples are checked in worker processes (jobs > 1) or inline. A SumLabError raised by a check becomes a
failed record carrying the message; the sweep always runs to the end.
"""

import bisect
import itertools
import logging
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable, Iterator, Optional, Sequence

from sumlab import oscillatory as osc
from sumlab.characters import char_from_index
from sumlab.circle_method import delta_kloosterman, delta_lowered
from sumlab.config import TARGETS, SweepSpec
from sumlab.errors import SpecInvalid, SumLabError
from sumlab.modarith import PrimePowerModulus, crt_combine, mod_inverse, unit_residues, valuation
from sumlab.paper_sums import (
    AParams,
    BStarParams,
    CStarParams,
    check_bstar_split,
    check_cstar_split,
    check_quintic,
    check_sum_A,
    verify_lemma5,
    verify_lemma6,
    verify_lemma7,
)
from sumlab.report import Claim, TupleCheck, VerificationRecord, VerificationReport
from sumlab.values import SumValue

logger = logging.getLogger(__name__)

CIRCLE_TOL = 1e-8
SELF_CONSISTENCY_TOL = 1e-7
SYMMETRY_TOL = 1e-12
GROWTH_FACTOR = 2.0
SERIES_POINTS = 16
OSCILLATORY_Q = 200.0
I_ZETA_POINTS = 33
I_DOUBLINGS = 6


@dataclass(frozen=True)
class Block:
    """Outer parameters shared by every tuple of the block, and the inner axes to combine."""

    prefix: tuple
    axes: tuple[tuple, ...]

    @property
    def size(self) -> int:
        return math.prod(len(axis) for axis in self.axes)

    def point(self, index: int) -> tuple:
        values = []
        for axis in reversed(self.axes):
            index, digit = divmod(index, len(axis))
            values.append(axis[digit])
        return self.prefix + tuple(reversed(values))


def sample_blocks(blocks: Sequence[Block], limit: int, seed: int) -> list[tuple]:
    """All points when there are at most limit of them, otherwise a seeded sample in enumeration order."""
    sizes = list(itertools.accumulate(block.size for block in blocks))
    total = sizes[-1] if sizes else 0
    if total <= limit:
        indices = range(total)
    else:
        indices = sorted(random.Random(seed).sample(range(total), limit))
    points = []
    for index in indices:
        position = bisect.bisect_right(sizes, index)
        offset = index - (sizes[position - 1] if position else 0)
        points.append(blocks[position].point(offset))
    return points


@dataclass(frozen=True)
class Task:
    """One tuple to check: the kind of check, its record columns and the checker arguments."""

    target: str
    kind: str
    fields: tuple[tuple[str, Any], ...]
    args: tuple
    scale: float = 1.0
    series: Optional[str] = None
    x: Optional[float] = None


def _character(p: int, kappa: int, t: int):
    return char_from_index(PrimePowerModulus(p, kappa), t)


def _primitive_indices(p: int, kappa: int) -> tuple[int, ...]:
    # chi with index t is primitive iff p does not divide t
    return tuple(t for t in range(PrimePowerModulus(p, kappa).phi) if t % p)


def _signed_range(limit: int, coprime_to: int = 1, step: int = 1) -> tuple[int, ...]:
    """Nonzero multiples of step with |m| <= max(limit, step), coprime to coprime_to."""
    top = max(1, limit // step)
    values = [sign * j * step for j in range(1, top + 1) for sign in (1, -1)]
    return tuple(sorted(m for m in values if math.gcd(m, coprime_to) == 1))


def _units(q: int) -> tuple[int, ...]:
    return (1,) if q == 1 else unit_residues(q)


def _n1_choices(q1: int, q2: int) -> list[int]:
    g = math.gcd(q1, q2)
    return [d for d in range(1, g + 1) if g % d == 0]


# ---------------------------------------------------------------------------
# Checkers, run inside the workers
# ---------------------------------------------------------------------------


def _check_eq4_3(p, kappa, lam, q, a, m, b, t, scale):
    return check_sum_A(_character(p, kappa, t), AParams(m, a, b, q, kappa, lam), scale)


def _check_cstar(params: CStarParams, t: int, scale: float):
    return check_cstar_split(_character(params.p, params.kappa, t), params, scale)


def _check_bstar(params: BStarParams, t: int, scale: float):
    return check_bstar_split(_character(params.p, params.kappa, t), params, scale)


def _check_lemma5(params, scale):
    return verify_lemma5(params, scale)


def _check_lemma6(params: CStarParams, t: int, scale: float):
    return verify_lemma6(_character(params.p, params.kappa, t), params, scale)


def _check_lemma7(params: BStarParams, t: int, with_naive: bool, scale: float):
    return verify_lemma7(_character(params.p, params.kappa, t), params, scale, with_naive=with_naive)


def _check_quintic(params: CStarParams, t: int, scale: float):
    return check_quintic(_character(params.p, params.kappa, t), params, scale)


def _check_circle(n: int, Q: float, scale: float):
    value = delta_kloosterman(n, Q)
    exact = 1.0 if n == 0 else 0.0
    error = abs(value - exact)
    claim = Claim("kloosterman_delta", error < CIRCLE_TOL, True, error, CIRCLE_TOL)
    return TupleCheck(SumValue(complex(value), error), SumValue.exact(exact), None, [claim], f"n={n} Q={Q:g}")


def _check_circle_lowered(n: int, p: int, lam: int, Q: float, scale: float):
    value = delta_lowered(n, p, lam, Q)
    exact = 1.0 if n == 0 else 0.0
    error = abs(value - exact)
    claim = Claim("lowered_delta", error < CIRCLE_TOL, True, error, CIRCLE_TOL)
    return TupleCheck(SumValue(complex(value), error), SumValue.exact(exact), None, [claim], f"n={n} Q={Q:g}")


def _check_gamma(sigma: float, tau: float, mu: osc.LanglandsParams, sign: int, scale: float):
    value = osc.gamma_pm(complex(sigma, tau), mu, sign)
    size = (1 + abs(tau)) ** (3 * (sigma + 0.5))
    claims = []
    if all(m.imag == 0 for m in mu.values):
        mirrored = osc.gamma_pm(complex(sigma, -tau), mu, -sign).conjugate()
        difference = abs(value - mirrored)
        claims.append(Claim("reflection", difference <= SYMMETRY_TOL * max(1.0, abs(value)), True, difference))
        if sigma == -0.5:
            claims.append(Claim("unit_size_on_critical_line", abs(value) <= 1 + 1e-9, True, abs(value), 1.0))
    return TupleCheck(SumValue(value, 0.0), None, size, claims)


def _check_mellin(r: float, tau: float, V: osc.BumpWeight, scale: float):
    value = osc.mellin_V(r, complex(0.5, -tau), V)
    size = (1 + abs(tau)) ** -0.5
    bound = osc.mellin_decay_bound(tau, V)
    claims = [Claim("second_derivative_test", abs(value) <= bound + value.error_budget, True, abs(value), bound)]
    return TupleCheck(value, None, size, claims)


def _check_mellin_oracle(r: float, s: complex, V: osc.BumpWeight, scale: float):
    value = osc.mellin_V(r, s, V)
    oracle = osc.mellin_V_mpmath(r, s, V)
    difference = abs(value.value - oracle)
    claims = [Claim("mpmath_agreement", difference <= 1e-9, True, difference, 1e-9)]
    return TupleCheck(SumValue(oracle, 0.0), value, None, claims)


def _check_integral_I(m: int, a: int, q: int, setup: osc.KernelSetup, scale: float):
    """Largest |I| over a zeta grid in [0, 1], against the integration-by-parts bound at the smallest |omega|."""
    zetas = [i / (I_ZETA_POINTS - 1) for i in range(I_ZETA_POINTS)]
    values = [osc.integral_I(m, a, q, zeta, setup) for zeta in zetas]
    bounds = [osc.integration_by_parts_bound(setup.omega(m, a, q, zeta), setup.U) for zeta in zetas]
    ok = all(abs(v) <= b + scale * v.error_budget for v, b in zip(values, bounds))
    # omega is linear in zeta
    first, last = setup.omega(m, a, q, 0.0), setup.omega(m, a, q, 1.0)
    omega_min = 0.0 if first * last <= 0 else min(abs(first), abs(last))
    bound = osc.integration_by_parts_bound(omega_min, setup.U)
    largest = max(values, key=abs)
    claims = [Claim("integration_by_parts", ok, True, abs(largest), bound)]
    return TupleCheck(largest, None, bound, claims, f"omega_min={omega_min:.4g}")


def _check_integral_J(y: float, a: int, q: int, zeta: float, setup: osc.KernelSetup, scale: float):
    r = zeta * setup.frequency(a, q)
    T, _ = osc.truncation_point([r], setup)
    value = osc.integral_J_pm(y, a, q, zeta, setup)
    doubled = osc.integral_J_pm(y, a, q, zeta, setup, truncation=2 * T)
    difference = abs(value.value - doubled.value)
    claims = [Claim("truncation_doubling", difference <= SELF_CONSISTENCY_TOL, True, difference, SELF_CONSISTENCY_TOL)]
    return TupleCheck(value, doubled, math.sqrt(setup.Q / q), claims)


def _check_integral_K(m: int, y: float, a: int, q: int, setup: osc.KernelSetup, scale: float):
    refined = osc.integral_K(m, y, a, q, setup, refine=True)
    plain = osc.integral_K(m, y, a, q, setup, refine=False)
    difference = abs(refined.value - plain.value)
    claims = [Claim("refinement", difference <= SELF_CONSISTENCY_TOL, True, difference, SELF_CONSISTENCY_TOL)]
    return TupleCheck(refined, plain, math.sqrt(q / setup.Q), claims)


CHECKERS: dict[str, Callable[..., TupleCheck]] = {
    "eq4_3": _check_eq4_3,
    "cstar": _check_cstar,
    "bstar": _check_bstar,
    "lemma5": _check_lemma5,
    "lemma6": _check_lemma6,
    "lemma7": _check_lemma7,
    "quintic": _check_quintic,
    "circle": _check_circle,
    "circle_lowered": _check_circle_lowered,
    "gamma": _check_gamma,
    "mellin": _check_mellin,
    "mellin_oracle": _check_mellin_oracle,
    "integral_I": _check_integral_I,
    "integral_J": _check_integral_J,
    "integral_K": _check_integral_K,
}


def run_task(task: Task) -> VerificationRecord:
    """Check one tuple. Library errors become a failed record."""
    fields = dict(task.fields)
    try:
        check = CHECKERS[task.kind](*task.args, task.scale)
    except SumLabError as e:
        logger.error(f"{task.target}/{task.kind} {fields}: {type(e).__name__}: {e}")
        record = VerificationRecord.from_error(task.target, fields, e)
    else:
        record = VerificationRecord.from_check(task.target, fields, check)
        logger.debug(f"{task.target}/{task.kind} {fields}: passed={record.passed} ratio={record.ratio}")
    if task.series is not None:
        series_note = f"series={task.series} x={task.x:.17g}"
        record.note = series_note if record.note is None else f"{series_note} {record.note}"
    return record


# ---------------------------------------------------------------------------
# Tuple generation per target
# ---------------------------------------------------------------------------


def _p_kappa_lambda(spec: SweepSpec, min_lambda: int = 1) -> Iterator[tuple[int, int, int]]:
    for p in spec.primes:
        for kappa in spec.kappas:
            for lam in spec.lambdas_for(kappa):
                if lam >= min_lambda:
                    yield p, kappa, lam


def _q_pairs(spec: SweepSpec, p: int) -> Iterator[tuple[int, int]]:
    qs = [q for q in range(1, spec.q_max + 1) if q % p]
    return itertools.product(qs, qs)


def _skip(target: str, what: str, cost: int, spec: SweepSpec) -> bool:
    if cost > spec.max_terms:
        logger.warning(f"{target}: skipping {what}, cost {cost} exceeds max_terms {spec.max_terms}")
        return True
    return False


def _fields(params, r_or_s: int) -> tuple[tuple[str, Any], ...]:
    return (
        ("p", params.p),
        ("kappa", params.kappa),
        ("lam", params.lam),
        ("r_or_s", r_or_s),
        ("q1", params.q1),
        ("q2", params.q2),
        ("m1", params.m1),
        ("m2", params.m2),
        ("n1p", params.n1p),
        ("n1pp", params.n1pp),
        ("n2", params.n2),
    )


def _eq4_3_tasks(spec: SweepSpec, target: str) -> list[Task]:
    blocks = []
    for p, kappa, lam in _p_kappa_lambda(spec):
        indices = _primitive_indices(p, kappa)
        ms = tuple(range(-spec.m_max, spec.m_max + 1))
        for q in range(1, spec.q_max + 1):
            if _skip(target, f"p={p} kappa={kappa} q={q}", q * p**kappa, spec):
                continue
            for a in _units(q):
                blocks.append(Block((p, kappa, lam, q, a), (ms, tuple(range(p**lam)), indices)))
    tasks = []
    for p, kappa, lam, q, a, m, b, t in sample_blocks(blocks, spec.max_tuples, spec.seed):
        fields = (("p", p), ("kappa", kappa), ("lam", lam), ("q1", q), ("m1", m))
        tasks.append(Task(target, "eq4_3", fields, (p, kappa, lam, q, a, m, b, t), spec.budget_scale))
    return tasks


def _cstar_blocks(spec: SweepSpec, target: str, lam_rule: Callable[[int, int, int], bool]) -> list[Block]:
    blocks = []
    n2s = tuple(range(-spec.n2_max, spec.n2_max + 1))
    for p, kappa, lam in _p_kappa_lambda(spec):
        if not lam_rule(p, kappa, lam):
            continue
        indices = _primitive_indices(p, kappa)
        for r in range(lam + 1):
            depth = lam - r
            for q1, q2 in _q_pairs(spec, p):
                for n1p in _n1_choices(q1, q2):
                    for j in range(depth + 1):
                        n1pp = p**j
                        p_hat = p**depth // n1pp
                        cost = (q1 // n1p) * (q2 // n1p) * p_hat * 2 * p**depth * p_hat
                        if _skip(target, f"p={p} kappa={kappa} lambda={lam} r={r} q=({q1},{q2})", cost, spec):
                            continue
                        axes = (
                            _signed_range(spec.m_max, q1),
                            _signed_range(spec.m_max, q2),
                            _units(q1),
                            _units(q2),
                            n2s,
                            indices,
                        )
                        blocks.append(Block((p, kappa, lam, r, q1, q2, n1p, n1pp), axes))
    return blocks


def _cstar_params(point: tuple) -> tuple[CStarParams, int]:
    p, kappa, lam, r, q1, q2, n1p, n1pp, m1, m2, a1, a2, n2, t = point
    return CStarParams(p, kappa, lam, r, m1, m2, a1, a2, q1, q2, n1p, n1pp, n2), t


def _b_units(q: int, p: int) -> tuple[int, ...]:
    return tuple(a for a in range(1, q * p) if math.gcd(a, q * p) == 1)


def _bstar_blocks(spec: SweepSpec, target: str, naive: bool) -> list[Block]:
    blocks = []
    n2s = tuple(range(-spec.n2_max, spec.n2_max + 1))
    for p, kappa, lam in _p_kappa_lambda(spec):
        indices = _primitive_indices(p, kappa)
        for s in range(1, kappa - lam + 1):
            for q1, q2 in _q_pairs(spec, p):
                for n1p in _n1_choices(q1, q2):
                    for j in range(lam + s + 1):
                        n1pp = p**j
                        rho = p ** (lam + s) // n1pp
                        cost = 2 * p**lam * rho * rho
                        if naive:
                            cost *= (q1 // n1p) * (q2 // n1p)
                        if _skip(target, f"p={p} kappa={kappa} lambda={lam} s={s} q=({q1},{q2})", cost, spec):
                            continue
                        axes = (
                            _signed_range(spec.m_max, q1, p**s),
                            _signed_range(spec.m_max, q2, p**s),
                            _b_units(q1, p),
                            _b_units(q2, p),
                            n2s,
                            indices,
                        )
                        blocks.append(Block((p, kappa, lam, s, q1, q2, n1p, n1pp), axes))
    return blocks


def _bstar_params(point: tuple) -> tuple[BStarParams, int]:
    p, kappa, lam, s, q1, q2, n1p, n1pp, m1, m2, a1, a2, n2, t = point
    return BStarParams(p, kappa, lam, s, m1, m2, a1, a2, q1, q2, n1p, n1pp, n2), t


def _build(target: str, kind: str, points: list[tuple], to_params, spec: SweepSpec, extra=()) -> list[Task]:
    tasks = []
    for point in points:
        params, t = to_params(point)
        r_or_s = params.r if isinstance(params, CStarParams) else params.s
        tasks.append(Task(target, kind, _fields(params, r_or_s), (params, t) + tuple(extra), spec.budget_scale))
    return tasks


def _cstar_split_tasks(spec: SweepSpec, target: str) -> list[Task]:
    half = spec.max_tuples // 2
    c_points = sample_blocks(_cstar_blocks(spec, target, lambda p, k, lam: True), spec.max_tuples - half, spec.seed)
    b_points = sample_blocks(_bstar_blocks(spec, target, naive=True), half, spec.seed + 1)
    return _build(target, "cstar", c_points, _cstar_params, spec) + _build(
        target, "bstar", b_points, _bstar_params, spec
    )


def _lemma5_a(m: int, q: int, p: int, kappa: int, lam: int, b_side: bool) -> int:
    """a = m^-1 p^(kappa-lambda) mod q, lifted to a unit mod p for the B-sums."""
    a = mod_inverse(m, q) * p ** (kappa - lam) % q if q > 1 else 0
    if not b_side:
        return a if q > 1 else 1
    return crt_combine([(a, q), (1, p)]) if q > 1 else 1


def _lemma5_tasks(spec: SweepSpec, target: str) -> list[Task]:
    n2s = tuple(range(-spec.n2_max, spec.n2_max + 1))
    blocks = []
    for p, kappa, lam in _p_kappa_lambda(spec):
        for q1, q2 in _q_pairs(spec, p):
            for n1p in _n1_choices(q1, q2):
                blocks.append(
                    Block(
                        ("C", p, kappa, lam, 0, q1, q2, n1p, 1),
                        (_signed_range(spec.m_max, q1), _signed_range(spec.m_max, q2), n2s),
                    )
                )
                blocks.append(
                    Block(
                        ("B", p, kappa, lam, 1, q1, q2, n1p, 1),
                        (_signed_range(spec.m_max, q1, p), _signed_range(spec.m_max, q2, p), n2s),
                    )
                )
    tasks = []
    for side, p, kappa, lam, r_or_s, q1, q2, n1p, n1pp, m1, m2, n2 in sample_blocks(
        blocks, spec.max_tuples, spec.seed
    ):
        b_side = side == "B"
        a1 = _lemma5_a(m1, q1, p, kappa, lam, b_side)
        a2 = _lemma5_a(m2, q2, p, kappa, lam, b_side)
        cls = BStarParams if b_side else CStarParams
        params = cls(p, kappa, lam, r_or_s, m1, m2, a1, a2, q1, q2, n1p, n1pp, n2)
        tasks.append(Task(target, "lemma5", _fields(params, r_or_s), (params,), spec.budget_scale))
    return tasks


def _lemma6_tasks(spec: SweepSpec, target: str) -> list[Task]:
    blocks = _cstar_blocks(spec, target, lambda p, kappa, lam: 3 * lam <= 2 * kappa)
    return _build(target, "lemma6", sample_blocks(blocks, spec.max_tuples, spec.seed), _cstar_params, spec)


def _lemma7_tasks(spec: SweepSpec, target: str) -> list[Task]:
    tasks = []
    for point in sample_blocks(_bstar_blocks(spec, target, naive=False), spec.max_tuples, spec.seed):
        params, t = _bstar_params(point)
        q_part = params.q1_hat * params.q2_hat
        naive = 2 * q_part * params.p**params.lam * params.rho_hat**2 <= spec.max_terms
        tasks.append(Task(target, "lemma7", _fields(params, params.s), (params, t, naive), spec.budget_scale))
    return tasks


def _quintic_tasks(spec: SweepSpec, target: str) -> list[Task]:
    blocks = []
    for p, kappa, lam in _p_kappa_lambda(spec):
        indices = _primitive_indices(p, kappa)
        for r in range(lam - 1):
            alpha = (lam - r) // 2
            n2s = tuple(n for n in range(-spec.n2_max, spec.n2_max + 1) if n and valuation(n, p) < alpha)
            for q1, q2 in _q_pairs(spec, p):
                for n1p in _n1_choices(q1, q2):
                    axes = (
                        _signed_range(spec.m_max, q1 * p),
                        _signed_range(spec.m_max, q2 * p),
                        _units(q1),
                        _units(q2),
                        n2s,
                        indices,
                    )
                    blocks.append(Block((p, kappa, lam, r, q1, q2, n1p, 1), axes))
    return _build(target, "quintic", sample_blocks(blocks, spec.max_tuples, spec.seed), _cstar_params, spec)


def _circle_tasks(spec: SweepSpec, target: str) -> list[Task]:
    tasks = []
    for Q in spec.Q_values:
        for n in range(-spec.n_max, spec.n_max + 1):
            tasks.append(Task(target, "circle", (), (n, Q), spec.budget_scale))
    for p in spec.primes:
        lam = 2
        for Q in spec.Q_values:
            for n in range(-spec.n_max, spec.n_max + 1):
                fields = (("p", p), ("lam", lam))
                tasks.append(Task(target, "circle_lowered", fields, (n, p, lam, Q), spec.budget_scale))
    return tasks


def geometric_points(lo: float, hi: float, count: int = SERIES_POINTS) -> list[float]:
    if hi <= lo:
        return [lo]
    ratio = (hi / lo) ** (1 / (count - 1))
    return [lo * ratio**i for i in range(count)]


def oscillatory_setup(spec: SweepSpec) -> osc.KernelSetup:
    """
    Kernel setup for the modulus sweeps: p = first prime, lambda = 2, N = p^2 Q^2 with Q = OSCILLATORY_Q,
    and kappa just large enough that m a / p^(kappa-lambda) lies in [0, 1] for m = 1 and a near Q.
    """
    p, lam = spec.primes[0], 2
    kappa = lam + 1
    while p ** (kappa - lam) <= OSCILLATORY_Q + 8:
        kappa += 1
    return osc.KernelSetup(N=p**lam * OSCILLATORY_Q**2, p=p, kappa=kappa, lam=lam)


def _first_a(Q: float, q: int) -> int:
    a = math.floor(Q) + 1
    while math.gcd(a, q) != 1:
        a += 1
    return a


def _oscillatory_tasks(spec: SweepSpec, target: str) -> list[Task]:
    tasks = []
    scale = spec.budget_scale
    taus = geometric_points(1.0, spec.tau_max)
    for sigma in (-0.5, 0.0):
        for i, mu in enumerate(osc.sample_triples()):
            for sign in (1, -1):
                name = f"gamma sigma={sigma:g} mu={i} sign={sign:+d}"
                for tau in taus:
                    tasks.append(Task(target, "gamma", (), (sigma, tau, mu, sign), scale, name, tau))
    for r in (0.0, 0.5, 1.0):
        for tau in taus:
            tasks.append(Task(target, "mellin", (), (r, tau, osc.V_WEIGHT), scale, f"mellin r={r:g}", tau))
    tasks.append(Task(target, "mellin_oracle", (), (1.0, 0.5 + 0j, osc.V_WEIGHT), scale))

    setup = oscillatory_setup(spec)
    fields = (("p", setup.p), ("kappa", setup.kappa), ("lam", setup.lam))
    Q = setup.Q
    qs = sorted({max(1, round(x)) for x in geometric_points(1.0, Q, 8)})
    for q in qs:
        a = _first_a(Q, q)
        row = fields + (("q1", q),)
        tasks.append(Task(target, "integral_J", row, (1.0, a, q, 0.5, setup), scale, "J", q))
        tasks.append(Task(target, "integral_K", row + (("m1", 1),), (1, 1.0, a, q, setup), scale, "K", q))
    # m-doubling at the largest modulus, starting where omega no longer vanishes on [0, 1]
    q = qs[-1]
    a = _first_a(Q, q)
    m0 = math.floor(setup.frequency(a, q) * q * setup.p**setup.kappa / setup.N) + 1
    for j in range(I_DOUBLINGS):
        m = m0 * 2**j
        row = fields + (("q1", q), ("m1", m))
        tasks.append(Task(target, "integral_I", row, (m, a, q, setup), scale, "I", m))
    return tasks


SUITES: dict[str, Callable[[SweepSpec, str], list[Task]]] = {
    "eq4_3": _eq4_3_tasks,
    "cstar_split": _cstar_split_tasks,
    "lemma5": _lemma5_tasks,
    "lemma6": _lemma6_tasks,
    "lemma7": _lemma7_tasks,
    "circle": _circle_tasks,
    "oscillatory_bounds": _oscillatory_tasks,
    "quintic": _quintic_tasks,
}


# ---------------------------------------------------------------------------
# Series summaries and the sweep driver
# ---------------------------------------------------------------------------


def top_decade_bounded(points: Sequence[tuple[float, float]], factor: float = GROWTH_FACTOR) -> bool:
    """max ratio over x >= x_max / 10 is at most factor times the max ratio over the rest."""
    if not points:
        return True
    x_max = max(x for x, _ in points)
    top = [ratio for x, ratio in points if x >= x_max / 10]
    rest = [ratio for x, ratio in points if x < x_max / 10]
    if not rest:
        return True
    return max(top) <= factor * max(rest)


def summarize_series(
    target: str, tasks: Sequence[Task], records: Sequence[VerificationRecord]
) -> list[VerificationRecord]:
    """One summary record per series, in order of first appearance."""
    series: dict[str, list[tuple[float, Optional[float]]]] = {}
    for task, record in zip(tasks, records):
        if task.series is not None:
            series.setdefault(task.series, []).append((task.x, record.ratio))
    summaries = []
    for name, points in series.items():
        known = [(x, ratio) for x, ratio in points if ratio is not None]
        ok = len(known) == len(points) and top_decade_bounded(known)
        fitted = max((ratio for _, ratio in known), default=None)
        claim = Claim("no_growth_top_decade", ok, True, fitted)
        summaries.append(VerificationRecord(target, ratio=fitted, passed=ok, claims=[claim], note=f"summary {name}"))
    return summaries


@dataclass
class SweepPlan:
    target: str
    tasks: list[Task] = field(default_factory=list)


def plan_sweep(target: str, spec: SweepSpec) -> SweepPlan:
    if target not in TARGETS:
        raise SpecInvalid(f"unknown target {target!r}, expected one of {', '.join(TARGETS)}")
    spec.validate(target)
    return SweepPlan(target, SUITES[target](spec, target))


def _execute(tasks: list[Task], jobs: int) -> list[VerificationRecord]:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_task(task) for task in tasks]
    chunksize = max(1, len(tasks) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(run_task, tasks, chunksize=chunksize))


def run_verify(target: str, spec: SweepSpec) -> VerificationReport:
    """Run the suite of target over the sweep; records come out in tuple order at any parallelism."""
    start = time.monotonic()
    plan = plan_sweep(target, spec)
    logger.info(f"Starting {target}: {len(plan.tasks)} tuples, jobs={spec.jobs}")
    records = _execute(plan.tasks, spec.jobs)
    records.extend(summarize_series(target, plan.tasks, records))
    report = VerificationReport(
        target,
        records,
        generated_at=datetime.now(timezone.utc).isoformat(),
        wall_time_s=time.monotonic() - start,
    )
    summary = report.summary
    logger.info(
        f"Finished {target}: {summary.passed}/{summary.total} passed, {summary.errors} errors, "
        f"max ratio {summary.max_ratio}, {report.wall_time_s:.1f}s"
    )
    return report
