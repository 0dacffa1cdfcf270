"""Measurements (POMs) on quantum sources and the classical sources they induce."""

from .bounds import (
    BOUND_TOL,
    BoundMargin,
    classical_entropy_rate,
    jensen_bound_check,
    quantum_bound_check,
)
from .cylinder import (
    CylinderMeasure,
    ZeroProbabilityWord,
    cylinder_measure,
    empirical_entropy,
    shannon_block_entropy,
)
from .pom import (
    InvalidPom,
    Pom,
    PomVerdict,
    block_projective_pom,
    computational_pom,
    eigenbasis_pom,
    explicit_pom,
    random_pom,
    random_projective_pom,
    scaled_identity_pom,
    uniform_pom,
    validate_pom,
)
from .sampling import MessageSet, sample_messages
from .transfer import (
    TransferState,
    format_word,
    parse_word,
    pattern_probability,
    prefix_probabilities,
    split_word,
    transfer_prefix,
)

__all__ = [
    "BOUND_TOL",
    "BoundMargin",
    "CylinderMeasure",
    "InvalidPom",
    "MessageSet",
    "Pom",
    "PomVerdict",
    "TransferState",
    "ZeroProbabilityWord",
    "block_projective_pom",
    "classical_entropy_rate",
    "computational_pom",
    "cylinder_measure",
    "eigenbasis_pom",
    "empirical_entropy",
    "explicit_pom",
    "format_word",
    "jensen_bound_check",
    "parse_word",
    "pattern_probability",
    "prefix_probabilities",
    "quantum_bound_check",
    "random_pom",
    "random_projective_pom",
    "sample_messages",
    "scaled_identity_pom",
    "split_word",
    "shannon_block_entropy",
    "transfer_prefix",
    "uniform_pom",
    "validate_pom",
]
