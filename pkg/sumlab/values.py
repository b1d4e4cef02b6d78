"""
SumValue: the result type of every sum, a complex value with an accumulated rounding budget.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

MACHINE_EPS = float(np.finfo(np.float64).eps)

# Slack on top of eps * terms * max_term.
BUDGET_SAFETY = 64.0

Number = Union[int, float, complex]


@dataclass(frozen=True)
class SumValue:
    """A complex number with an absolute rounding bound."""

    value: complex
    error_budget: float = 0.0

    @classmethod
    def exact(cls, value: Number) -> SumValue:
        value = complex(value)
        return cls(value, MACHINE_EPS * abs(value))

    @classmethod
    def zero(cls) -> SumValue:
        return cls(0j, 0.0)

    @classmethod
    def from_terms(cls, total: Number, n_terms: int, max_term: float, inherited: float = 0.0) -> SumValue:
        budget = BUDGET_SAFETY * MACHINE_EPS * max(n_terms, 1) * max_term + inherited
        return cls(complex(total), budget)

    @classmethod
    def from_array(cls, terms: np.ndarray, inherited: float = 0.0) -> SumValue:
        """Sum a numpy array of terms (pairwise summation) and size the budget from it."""
        if terms.size == 0:
            return cls(0j, inherited)
        return cls.from_terms(complex(np.sum(terms)), int(terms.size), float(np.max(np.abs(terms))), inherited)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __abs__(self) -> float:
        return abs(self.value)

    def conjugate(self) -> SumValue:
        return SumValue(self.value.conjugate(), self.error_budget)

    def __mul__(self, other: Union[SumValue, Number]) -> SumValue:
        if isinstance(other, SumValue):
            value = self.value * other.value
            budget = (
                abs(self.value) * other.error_budget
                + abs(other.value) * self.error_budget
                + self.error_budget * other.error_budget
                + BUDGET_SAFETY * MACHINE_EPS * abs(value)
            )
            return SumValue(value, budget)
        factor = complex(other)
        value = self.value * factor
        return SumValue(value, abs(factor) * self.error_budget + BUDGET_SAFETY * MACHINE_EPS * abs(value))

    __rmul__ = __mul__

    def __add__(self, other: Union[SumValue, Number]) -> SumValue:
        if not isinstance(other, SumValue):
            other = SumValue.exact(other)
        value = self.value + other.value
        budget = self.error_budget + other.error_budget + MACHINE_EPS * (abs(self.value) + abs(other.value))
        return SumValue(value, budget)

    __radd__ = __add__

    def agrees_with(self, other: Union[SumValue, Number], scale: float = 1.0) -> bool:
        """True when the two values differ by at most the combined budgets."""
        if not isinstance(other, SumValue):
            other = SumValue.exact(other)
        return bool(abs(self.value - other.value) <= scale * (self.error_budget + other.error_budget))

    def vanishes(self, scale: float = 1.0) -> bool:
        """True when |value| is within the budget of zero."""
        return bool(abs(self.value) <= scale * self.error_budget)


class SumAccumulator:
    """Running complex sum tracking the term count, the largest term and inherited budgets."""

    __slots__ = ("total", "n_terms", "max_term", "inherited")

    def __init__(self) -> None:
        self.total = 0j
        self.n_terms = 0
        self.max_term = 0.0
        self.inherited = 0.0

    def add(self, term: Union[SumValue, Number]) -> None:
        if isinstance(term, SumValue):
            self.inherited += term.error_budget
            term = term.value
        self.total += term
        self.n_terms += 1
        size = abs(term)
        if size > self.max_term:
            self.max_term = size

    def result(self) -> SumValue:
        if self.n_terms == 0:
            return SumValue.zero()
        return SumValue.from_terms(self.total, self.n_terms, self.max_term, self.inherited)


@lru_cache(maxsize=1 << 16)
def unit_root(k: int, n: int) -> complex:
    """e(k/n) = exp(2*pi*i*k/n), with k reduced modulo n first."""
    return cmath.exp(2j * math.pi * (k % n) / n)


def unit_roots(ks: np.ndarray, n: int) -> np.ndarray:
    """Vectorized unit_root over an integer array."""
    return np.exp(2j * np.pi * (np.asarray(ks, dtype=np.int64) % n) / n)


def e(x: float) -> complex:
    """Additive character e(x) for a real argument."""
    return cmath.exp(2j * math.pi * x)
