from __future__ import annotations

"""Density matrices and the signal ensembles they come from."""

import logging
from dataclasses import InitVar, dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from linalg import (
    PSD_FLOOR,
    as_matrix,
    eigvalsh_desc,
    hermitian_residual,
    symmetrize,
)

log = logging.getLogger(__name__)

TRACE_TOL = 1e-10
NORM_TOL = 1e-12


class InvalidSource(ValueError):
    """A source, ensemble or density matrix violates its defining constraints."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive, unit-trace Hermitian matrix.

    Blocks produced internally are trusted and built with ``validate=False``;
    user input is always checked.
    """

    matrix: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not validate:
            return
        if m.shape[0] != m.shape[1]:
            raise InvalidSource(f"density matrix must be square, got {m.shape}")
        residual = hermitian_residual(m)
        if residual > 1e-12:
            raise InvalidSource(f"density matrix is not Hermitian ({residual:.3e})")
        m = symmetrize(m)
        object.__setattr__(self, "matrix", m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidSource(f"density matrix has trace {tr:.12g}, expected 1")
        if self.min_eigenvalue < PSD_FLOOR:
            raise InvalidSource(
                f"density matrix has eigenvalue {self.min_eigenvalue:.3e} < 0"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> np.ndarray:
        return eigvalsh_desc(self.matrix)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.spectrum[-1])

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True, eq=False)
class SignalEnsemble:
    """Unit-norm signals ``|ψ_j⟩`` in ``C^d`` emitted with probabilities ``p_j``."""

    signals: np.ndarray  # (s, d)
    probs: np.ndarray  # (s,)

    def __post_init__(self) -> None:
        signals = np.atleast_2d(np.asarray(self.signals, dtype=complex))
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if signals.shape[0] != probs.shape[0]:
            raise InvalidSource(
                f"{signals.shape[0]} signals but {probs.shape[0]} probabilities"
            )
        norms = np.linalg.norm(signals, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            bad = int(np.argmax(np.abs(norms - 1.0)))
            raise InvalidSource(f"signal {bad} has norm {norms[bad]:.15g}, expected 1")
        if np.any(probs < 0):
            raise InvalidSource("signal probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > NORM_TOL:
            raise InvalidSource(f"signal probabilities sum to {probs.sum():.15g}")
        rank = int(np.linalg.matrix_rank(signals, tol=1e-10))
        if rank != signals.shape[1]:
            raise InvalidSource(
                f"signals span a {rank}-dim subspace of C^{signals.shape[1]}"
            )
        object.__setattr__(self, "signals", signals)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_lists(
        cls, signals: Sequence[Sequence[complex]], probs: Sequence[float]
    ) -> "SignalEnsemble":
        return cls(np.asarray(signals, dtype=complex), np.asarray(probs, dtype=float))

    @property
    def s(self) -> int:
        return self.signals.shape[0]

    @property
    def d(self) -> int:
        return self.signals.shape[1]


def ensemble_to_density(e: SignalEnsemble) -> DensityMatrix:
    """ρ = Σ p_j |ψ_j⟩⟨ψ_j|."""
    rho = np.einsum("j,ja,jb->ab", e.probs, e.signals, e.signals.conj())
    return DensityMatrix(rho)
