"""Von Neumann entropies of blocks and their rate estimators."""

from .rates import (
    ENTROPY_TOL,
    BoundChainVerdict,
    EntropyReport,
    MonotoneVerdict,
    SubadditivityVerdict,
    block_entropy_sequence,
    check_bound_chain,
    check_monotone_ratio,
    check_subadditivity,
    closed_form_rate,
    commuting_r_closed_form,
)
from .spectral import klein_gap, shannon, von_neumann

__all__ = [
    "ENTROPY_TOL",
    "BoundChainVerdict",
    "EntropyReport",
    "MonotoneVerdict",
    "SubadditivityVerdict",
    "block_entropy_sequence",
    "check_bound_chain",
    "check_monotone_ratio",
    "check_subadditivity",
    "closed_form_rate",
    "commuting_r_closed_form",
    "klein_gap",
    "shannon",
    "von_neumann",
]
