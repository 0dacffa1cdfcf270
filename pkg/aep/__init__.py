"""Typical sets and typical subspaces (Shannon-McMillan at desk scale)."""

from .bounds import (
    AEP_TOL,
    CountBounds,
    DimensionVerdict,
    ExpectationVerdict,
    ObservableDeviation,
    check_expectation_preservation,
    deviation_operator,
    dimension_bounds,
    worst_case_deviation,
)
from .projector import NotProjective, TypicalProjector, typical_projector
from .report import (
    AepReport,
    build_aep_report,
    check_dimension_bounds,
    reference_rate,
)
from .typical import (
    AepParams,
    SampledTypicality,
    TypicalSplit,
    sampled_atypical_fraction,
    typical_split,
)

__all__ = [
    "AEP_TOL",
    "AepParams",
    "AepReport",
    "CountBounds",
    "DimensionVerdict",
    "ExpectationVerdict",
    "NotProjective",
    "ObservableDeviation",
    "SampledTypicality",
    "TypicalProjector",
    "TypicalSplit",
    "build_aep_report",
    "check_dimension_bounds",
    "check_expectation_preservation",
    "deviation_operator",
    "dimension_bounds",
    "reference_rate",
    "sampled_atypical_fraction",
    "typical_projector",
    "typical_split",
    "worst_case_deviation",
]
