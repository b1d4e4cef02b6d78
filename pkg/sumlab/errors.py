"""
Exception hierarchy for sumlab.

Library code raises these; the lab layer catches SumLabError per parameter tuple and records it.
"""


class SumLabError(Exception):
    """Base class for every sumlab error."""


class InvalidParameters(SumLabError, ValueError):
    """A parameter tuple violates the invariants of its type."""


# modarith
class NotInvertible(SumLabError, ValueError):
    """gcd(a, m) != 1, so a has no inverse modulo m."""


class NonCoprimeModuli(SumLabError, ValueError):
    """CRT input moduli are not pairwise coprime."""


class NotAUnit(SumLabError, ValueError):
    """Discrete logarithm requested for a non-unit residue."""


class ZeroPolynomial(SumLabError, ValueError):
    """Every coefficient vanishes modulo p^k, so every residue is a root."""


# characters
class IndexOutOfRange(SumLabError, ValueError):
    """Character index outside [0, phi(p^k))."""


class DepthTooLarge(SumLabError, ValueError):
    """Linearization depth alpha with 2*alpha > kappa."""


class NotPrimitive(SumLabError, ValueError):
    """Operation needs a primitive character."""


# paper_sums
class NotDivisible(SumLabError, ValueError):
    """An exact division by a power of p is not possible."""


class NonInvertibleWitness(SumLabError, ValueError):
    """A Kloosterman argument needs an inverse that does not exist."""


class PreconditionViolated(SumLabError, ValueError):
    """A fast evaluation was requested outside its domain."""


# oscillatory
class QuadratureFailure(SumLabError, ArithmeticError):
    """Quadrature did not reach its tolerance within the iteration cap."""


class NearPole(SumLabError, ArithmeticError):
    """Gamma kernel evaluated too close to a pole."""


# lab
class SpecInvalid(SumLabError, ValueError):
    """Sweep configuration is malformed or outside the module caps."""


class IoFailure(SumLabError, OSError):
    """Report could not be written or read."""
