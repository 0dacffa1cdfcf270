from __future__ import annotations

"""Spectral entropy functions (all in nats)."""

import logging
import math

import numpy as np

from linalg import ZERO_EIGENVALUE, as_matrix, eig_hermitian, eigvalsh_desc, xlogx
from sources import DensityMatrix

log = logging.getLogger(__name__)

SUPPORT_TOL = 1e-10


def von_neumann(rho: DensityMatrix | np.ndarray) -> float:
    """−Σ λ log λ with eigenvalues below 1e-14 counted as exact zeros."""
    spectrum = rho.spectrum if isinstance(rho, DensityMatrix) else eigvalsh_desc(rho)
    return float(-np.sum(xlogx(spectrum)))


def shannon(probs: np.ndarray) -> float:
    """−Σ p log p over any array of probabilities."""
    p = np.asarray(probs, dtype=float).reshape(-1)
    return float(-np.sum(xlogx(p, floor=0.0)))


def klein_gap(a: np.ndarray, b: np.ndarray) -> float:
    """tr(A log A − A log B) − tr(A − B) for PSD ``a``, ``b``.

    Returns ``inf`` when the support of ``a`` is not inside the support of ``b``.
    """
    a, b = as_matrix(a), as_matrix(b)
    a_log_a = float(np.sum(xlogx(eigvalsh_desc(a))))
    dec = eig_hermitian(b)
    # ⟨v_i|A|v_i⟩ in the eigenbasis of B
    weights = np.einsum("ji,jk,ki->i", dec.eigenvectors.conj(), a, dec.eigenvectors).real
    support = dec.eigenvalues > ZERO_EIGENVALUE
    leak = float(np.sum(np.abs(weights[~support])))
    if leak > SUPPORT_TOL:
        log.debug("klein_gap: support of A leaks %.3e outside supp(B)", leak)
        return math.inf
    a_log_b = float(np.sum(weights[support] * np.log(dec.eigenvalues[support])))
    return a_log_a - a_log_b - float(np.trace(a - b).real)
