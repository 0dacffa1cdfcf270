from __future__ import annotations

"""Seeded random matrices for sweeps and property checks."""

import numpy as np
from scipy.stats import unitary_group

from .kernels import hermitian_norm, symmetrize


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    return np.asarray(unitary_group.rvs(d, random_state=rng), dtype=complex)


def random_complex(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(d: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix rescaled to operator norm ``norm``."""
    h = symmetrize(random_complex(d, d, rng))
    return h * (norm / hermitian_norm(h))


def random_isometry(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``d×k`` matrix with orthonormal columns (Haar, via QR of a Gaussian)."""
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    q, r = np.linalg.qr(random_complex(d, k, rng))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases[None, :]


def random_reflection_frame(
    d: int, k: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Factors ``(V, s)`` of the Hermitian C = V diag(s) V† with s = ±1.

    ‖C‖ = 1 exactly; tr(C X) = Σ_j s_j (V† X V)_jj costs O(d²k).
    """
    v = random_isometry(d, k, rng)
    s = rng.choice([-1.0, 1.0], size=k)
    return v, s


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Positive semidefinite ``G G†``; full support unless ``rank`` < d."""
    g = random_complex(d, rank or d, rng)
    return g @ g.conj().T


def random_density(
    d: int, rng: np.random.Generator, rank: int | None = None
) -> np.ndarray:
    p = random_psd(d, rng, rank)
    return p / np.trace(p).real
