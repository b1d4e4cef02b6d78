"""
sumlab: a verification laboratory for character sums modulo prime powers, Kloosterman's circle method
and the oscillatory kernels of the delta method.
"""

from sumlab.config import SweepSpec, auto_lambda
from sumlab.errors import SumLabError
from sumlab.lab import run_verify
from sumlab.report import VerificationReport, emit_report
from sumlab.values import SumValue

__all__ = [
    "SumLabError",
    "SumValue",
    "SweepSpec",
    "VerificationReport",
    "auto_lambda",
    "emit_report",
    "run_verify",
]
