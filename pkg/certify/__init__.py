"""Sufficient positivity threshold for the Pauli source and the A_n recursion."""

from .certificate import PositivityCertificate, certify, grid_certify
from .decomposition import (
    AnRecursion,
    AnRow,
    OmegaQ,
    SingularBlock,
    a_n_recursion,
    appendix_form_residual,
    build_omega_q,
    s_operator,
)

__all__ = [
    "AnRecursion",
    "AnRow",
    "OmegaQ",
    "PositivityCertificate",
    "SingularBlock",
    "a_n_recursion",
    "appendix_form_residual",
    "build_omega_q",
    "certify",
    "grid_certify",
    "s_operator",
]
