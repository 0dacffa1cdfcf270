"""Dense complex linear algebra: Kronecker products, partial traces, spectra."""

from .kernels import (
    PAULI,
    PSD_FLOOR,
    SIGMA_0,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    TOL_HERM,
    ZERO_EIGENVALUE,
    DimensionMismatch,
    NotHermitianError,
    SpectralDecomposition,
    apply_local,
    apply_spectral,
    as_matrix,
    commutator_norm,
    eig_hermitian,
    eigvalsh_desc,
    embed,
    hermitian_norm,
    hermitian_residual,
    identity,
    is_hermitian,
    kron,
    kron_power,
    level_pauli,
    marginal,
    min_eigenvalue,
    operator_norm,
    partial_trace,
    safe_log,
    site_count,
    symmetrize,
    trace_norm,
    xlogx,
)

__all__ = [
    "PAULI",
    "PSD_FLOOR",
    "SIGMA_0",
    "SIGMA_1",
    "SIGMA_2",
    "SIGMA_3",
    "TOL_HERM",
    "ZERO_EIGENVALUE",
    "DimensionMismatch",
    "NotHermitianError",
    "SpectralDecomposition",
    "apply_local",
    "apply_spectral",
    "as_matrix",
    "commutator_norm",
    "eig_hermitian",
    "eigvalsh_desc",
    "embed",
    "hermitian_norm",
    "hermitian_residual",
    "identity",
    "is_hermitian",
    "kron",
    "kron_power",
    "level_pauli",
    "marginal",
    "min_eigenvalue",
    "operator_norm",
    "partial_trace",
    "safe_log",
    "site_count",
    "symmetrize",
    "trace_norm",
    "xlogx",
]
