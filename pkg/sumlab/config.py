"""
Sweep configuration.

A sweep is described by a flat ``key = value`` file::

    # lemma 6 ladder on small moduli
    primes = 3, 5
    kappa = 3..6
    lambda = auto
    q_max = 4

``lambda`` is ``auto`` (one lambda per kappa), ``all`` or an explicit list.

Values resolve as built-in defaults < config file < SUMLAB_JOBS < command-line flags.
"""

import logging
import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Union

from sympy import isprime

from sumlab.errors import SpecInvalid
from sumlab.modarith import MAX_MODULUS

logger = logging.getLogger(__name__)

TARGETS = (
    "eq4_3",
    "cstar_split",
    "lemma5",
    "lemma6",
    "lemma7",
    "circle",
    "oscillatory_bounds",
    "quintic",
)

JOBS_ENV = "SUMLAB_JOBS"

MAX_Q = 12
MAX_M = 100
MAX_TUPLES = 100_000
MAX_JOBS = 256
MAX_N = 100
MAX_Q_VALUE = 50
MAX_TAU = 1000.0
MIN_LAMBDA = 2
ALL_LAMBDAS = "all"


def auto_lambda(kappa: int) -> int:
    """lambda = floor(2 kappa / 5) + 1."""
    return 2 * kappa // 5 + 1


@dataclass(frozen=True)
class SweepSpec:
    primes: tuple[int, ...] = (3, 5)
    kappas: tuple[int, ...] = (3, 4, 5, 6)
    lambdas: Union[None, str, tuple[int, ...]] = None
    q_max: int = 4
    m_max: int = 20
    n2_max: int = 6
    max_tuples: int = 400
    max_terms: int = 2_000_000
    seed: int = 20240601
    jobs: int = 1
    budget_scale: float = 1.0
    n_max: int = 50
    Q_values: tuple[float, ...] = (1, 2, 3, 5, 10, 20)
    tau_max: float = 200.0
    target: Optional[str] = None

    def lambdas_for(self, kappa: int) -> list[int]:
        """The lambda values swept at this kappa, always below kappa."""
        if self.lambdas is None:
            candidates = [auto_lambda(kappa)]
        elif self.lambdas == ALL_LAMBDAS:
            candidates = list(range(MIN_LAMBDA, kappa))
        else:
            candidates = list(self.lambdas)
        return [lam for lam in candidates if MIN_LAMBDA <= lam < kappa]

    def validate(self, target: Optional[str] = None) -> "SweepSpec":
        """Check ranges against the caps, plus the hypotheses a target imposes."""
        target = target or self.target
        if target is not None and target not in TARGETS:
            raise SpecInvalid(f"unknown target {target!r}, expected one of {', '.join(TARGETS)}")
        if not self.primes:
            raise SpecInvalid("primes must not be empty")
        for p in self.primes:
            if p < 3 or not isprime(p):
                raise SpecInvalid(f"primes must be odd primes, got {p}")
        for kappa in self.kappas:
            if kappa <= MIN_LAMBDA:
                raise SpecInvalid(f"kappa must be > {MIN_LAMBDA}, got {kappa}")
            if max(self.primes) ** kappa > MAX_MODULUS:
                raise SpecInvalid(f"{max(self.primes)}^{kappa} exceeds the modulus cap {MAX_MODULUS}")
        if isinstance(self.lambdas, str) and self.lambdas != ALL_LAMBDAS:
            raise SpecInvalid(f"lambda must be auto, {ALL_LAMBDAS} or a list, got {self.lambdas!r}")
        if isinstance(self.lambdas, tuple) and self.kappas:
            top = max(self.kappas)
            for lam in self.lambdas:
                if not MIN_LAMBDA <= lam < top:
                    raise SpecInvalid(f"lambda must lie in [{MIN_LAMBDA}, {top}) for kappa up to {top}, got {lam}")
        _check_range("q_max", self.q_max, 0, MAX_Q)
        _check_range("m_max", self.m_max, 0, MAX_M)
        _check_range("n2_max", self.n2_max, 0, MAX_M)
        _check_range("max_tuples", self.max_tuples, 0, MAX_TUPLES)
        _check_range("max_terms", self.max_terms, 1, 10**12)
        _check_range("jobs", self.jobs, 1, MAX_JOBS)
        _check_range("n_max", self.n_max, 0, MAX_N)
        if not self.budget_scale > 0:
            raise SpecInvalid(f"budget_scale must be positive, got {self.budget_scale}")
        if any(not 1 <= Q <= MAX_Q_VALUE for Q in self.Q_values):
            raise SpecInvalid(f"Q values must lie in [1, {MAX_Q_VALUE}], got {self.Q_values}")
        if not 0 < self.tau_max <= MAX_TAU:
            raise SpecInvalid(f"tau_max must lie in (0, {MAX_TAU}], got {self.tau_max}")
        if target == "lemma6" and isinstance(self.lambdas, tuple):
            for kappa in self.kappas:
                for lam in self.lambdas_for(kappa):
                    if 3 * lam > 2 * kappa:
                        raise SpecInvalid(f"lemma6 needs lambda <= 2 kappa / 3, got lambda={lam} at kappa={kappa}")
        return self


def _check_range(name: str, value: int, lo: int, hi: int):
    if not lo <= value <= hi:
        raise SpecInvalid(f"{name} must lie in [{lo}, {hi}], got {value}")


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecInvalid(f"{key}: expected an integer, got {text!r}") from None


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SpecInvalid(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise SpecInvalid(f"{key}: expected a finite number, got {text!r}")
    return value


def parse_int_list(key: str, text: str) -> tuple[int, ...]:
    items = [item.strip() for item in text.split(",")]
    if not all(items):
        raise SpecInvalid(f"{key}: malformed list {text!r}")
    return tuple(_parse_int(key, item) for item in items)


def parse_kappa_range(text: str) -> tuple[int, ...]:
    """``a..b`` (inclusive) or a single integer."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = _parse_int("kappa", lo.strip()), _parse_int("kappa", hi.strip())
        if lo > hi:
            raise SpecInvalid(f"kappa: empty range {text!r}")
        return tuple(range(lo, hi + 1))
    return (_parse_int("kappa", text),)


def parse_lambda(text: str) -> Union[None, str, tuple[int, ...]]:
    """``auto`` (None), ``all`` (every 2 <= lambda < kappa) or a comma list."""
    word = text.strip().lower()
    if word == "auto":
        return None
    if word == ALL_LAMBDAS:
        return ALL_LAMBDAS
    return parse_int_list("lambda", text)


def _parse_value(key: str, text: str) -> tuple[str, object]:
    if key == "primes":
        return "primes", parse_int_list(key, text)
    if key == "kappa":
        return "kappas", parse_kappa_range(text)
    if key == "lambda":
        return "lambdas", parse_lambda(text)
    if key in ("q_max", "m_max", "n2_max", "max_tuples", "max_terms", "seed", "jobs", "n_max"):
        return key, _parse_int(key, text)
    if key in ("budget_scale", "tau_max"):
        return key, _parse_float(key, text)
    if key == "Q_values":
        return key, tuple(_parse_float(key, item.strip()) for item in text.split(","))
    if key == "target":
        if text not in TARGETS:
            raise SpecInvalid(f"target: unknown target {text!r}")
        return key, text
    raise SpecInvalid(f"unknown configuration key {key!r}")


def parse_config(text: str) -> dict:
    """Parse config text into SweepSpec field overrides."""
    overrides = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise SpecInvalid(f"line {number}: expected 'key = value', got {raw.strip()!r}")
        name, parsed = _parse_value(key.strip(), value.strip())
        overrides[name] = parsed
    return overrides


def load_config(path: Union[str, Path]) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecInvalid(f"cannot read config {path}: {e}") from e
    logger.debug(f"Loaded config from {path}")
    return parse_config(text)


def resolve_spec(
    path: Optional[Union[str, Path]] = None,
    flags: Optional[dict] = None,
    environ: Optional[dict] = None,
) -> SweepSpec:
    """Defaults, then the config file, then SUMLAB_JOBS, then flags (None values ignored)."""
    environ = os.environ if environ is None else environ
    overrides = load_config(path) if path is not None else {}
    if environ.get(JOBS_ENV):
        overrides["jobs"] = _parse_int(JOBS_ENV, environ[JOBS_ENV])
    known = {f.name for f in fields(SweepSpec)}
    for name, value in (flags or {}).items():
        if name not in known:
            raise SpecInvalid(f"unknown override {name!r}")
        if value is not None:
            overrides[name] = value
    return replace(SweepSpec(), **overrides)


def describe(spec: SweepSpec) -> list[str]:
    """Human-readable ``key = value`` lines for the resolved spec."""
    if spec.lambdas is None:
        lambdas = "auto"
    elif isinstance(spec.lambdas, str):
        lambdas = spec.lambdas
    else:
        lambdas = ", ".join(map(str, spec.lambdas))
    kappas = f"{spec.kappas[0]}..{spec.kappas[-1]}" if len(spec.kappas) > 1 else str(spec.kappas[0])
    return [
        f"primes = {', '.join(map(str, spec.primes))}",
        f"kappa = {kappas}",
        f"lambda = {lambdas}",
        f"q_max = {spec.q_max}",
        f"m_max = {spec.m_max}",
        f"n2_max = {spec.n2_max}",
        f"max_tuples = {spec.max_tuples}",
        f"max_terms = {spec.max_terms}",
        f"seed = {spec.seed}",
        f"jobs = {spec.jobs}",
        f"budget_scale = {spec.budget_scale}",
        f"n_max = {spec.n_max}",
        f"Q_values = {', '.join(format(Q, 'g') for Q in spec.Q_values)}",
        f"tau_max = {spec.tau_max:g}",
    ]
