"""Finite-window ergodicity diagnostics, quantum and classical."""

from .classical import ClassicalTimeAverage, Cylinder, classical_time_average_check, merge
from .quantum import (
    ContractionResult,
    FactorizationVerdict,
    Local,
    SupportEscape,
    TimeAverageProbe,
    TimeAverageResult,
    bernoulli_factorization_check,
    check_contraction,
    factorization_deviation,
    time_average_expectation,
    time_average_sweep,
    window_average,
)

__all__ = [
    "ClassicalTimeAverage",
    "ContractionResult",
    "Cylinder",
    "FactorizationVerdict",
    "Local",
    "SupportEscape",
    "TimeAverageProbe",
    "TimeAverageResult",
    "bernoulli_factorization_check",
    "check_contraction",
    "classical_time_average_check",
    "factorization_deviation",
    "merge",
    "time_average_expectation",
    "time_average_sweep",
    "window_average",
]
