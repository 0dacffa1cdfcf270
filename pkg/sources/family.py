from __future__ import annotations

"""Source families: the generators of consistent families of blocks Π_n."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from linalg import (
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    as_matrix,
    eig_hermitian,
    identity,
    kron,
    operator_norm,
    partial_trace,
)

from .density import DensityMatrix, InvalidSource, SignalEnsemble, ensemble_to_density
from .store import BlockStore

log = logging.getLogger(__name__)

R_TOL = 1e-10
GROUP_TOL = 1e-10


class SourceKind(str, Enum):
    bernoulli = "bernoulli"
    commuting_r = "commuting-r"
    pauli_r = "pauli-r"
    explicit_r = "explicit-r"


# ---------------------------------------------------------------------------
# R-matrix builders
# ---------------------------------------------------------------------------
def build_commuting_r(
    rho: DensityMatrix, basis: np.ndarray | None = None
) -> np.ndarray:
    """R = Σ_j P_j ⊗ P_j.

    Without ``basis`` the P_j are the spectral projectors of ρ, degenerate
    eigenvalues grouped at 1e-10. With ``basis`` (columns) they are the rank-1
    projectors onto those vectors.
    """
    return sum(np.kron(p, p) for p in commuting_projectors(rho, basis))


def commuting_projectors(
    rho: DensityMatrix, basis: np.ndarray | None = None
) -> list[np.ndarray]:
    if basis is None:
        return [p for _, p in eig_hermitian(rho.matrix).projectors(GROUP_TOL)]
    basis = as_matrix(basis)
    if basis.shape != (rho.dim, rho.dim):
        raise InvalidSource(f"basis must be {rho.dim}x{rho.dim}, got {basis.shape}")
    return [np.outer(v, v.conj()) for v in basis.T]


def pauli_rho(a: float) -> np.ndarray:
    """ρ = I/2 + (a/2)σ3."""
    _check_a(a)
    return 0.5 * identity(2) + 0.5 * a * SIGMA_3


def pauli_omega(a: float) -> np.ndarray:
    """ω = (a/2)I − σ3/2."""
    _check_a(a)
    return 0.5 * a * identity(2) - 0.5 * SIGMA_3


def build_pauli_r(a: float, b: float, c: float) -> np.ndarray:
    """R = I⊗ρ + ω⊗(bσ1 + cσ2)."""
    rho = pauli_rho(a)
    return kron(identity(2), rho) + kron(pauli_omega(a), b * SIGMA_1 + c * SIGMA_2)


def _check_a(a: float) -> None:
    if not abs(a) < 1:
        raise InvalidSource(f"Pauli source needs |a| < 1, got a={a}")


def r_residuals(rho: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """Return (‖tr₁((ρ⊗I)R) − ρ‖, ‖tr₂R − I‖)."""
    d = rho.shape[0]
    lead = partial_trace(np.kron(rho, identity(d)) @ r, (d, d), "leading")
    trail = partial_trace(r, (d, d), "trailing")
    return operator_norm(lead - rho), operator_norm(trail - identity(d))


# ---------------------------------------------------------------------------
# family
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SourceFamily:
    """Immutable description of a stationary quantum source.

    Use the classmethod constructors; they validate the R-matrix conditions
    ``tr₁((ρ⊗I)R) = ρ`` and ``tr₂R = I``.
    """

    kind: SourceKind
    rho: DensityMatrix
    r_matrix: np.ndarray | None = None
    pauli_params: tuple[float, float, float] | None = None
    projectors: tuple[np.ndarray, ...] | None = None  # commuting-r only
    label: str = ""
    blocks: BlockStore = field(default_factory=BlockStore, repr=False)

    @property
    def d(self) -> int:
        return self.rho.dim

    @cached_property
    def transfer_r(self) -> np.ndarray:
        """R used by the recursion; ``I⊗ρ`` for Bernoulli sources."""
        if self.r_matrix is not None:
            return self.r_matrix
        return np.kron(identity(self.d), self.rho.matrix)

    @cached_property
    def transfer_r4(self) -> np.ndarray:
        """R as a ``(d, d, d, d)`` tensor for site-by-site transfer.

        Prefix probabilities add up over the next symbol only when tr₂R = I,
        so control families that break it are refused here.
        """
        d = self.d
        if self.r_matrix is not None:
            _, trail = r_residuals(self.rho.matrix, self.r_matrix)
            if trail > R_TOL:
                raise InvalidSource(
                    f"transfer recursion needs tr₂R = I (residual {trail:.3e}); "
                    "use the dense blocks for this family"
                )
        return self.transfer_r.reshape(d, d, d, d)

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.pauli_params is not None:
            a, b, c = self.pauli_params
            return f"{self.kind.value}(a={a:g},b={b:g},c={c:g})"
        return f"{self.kind.value}(d={self.d})"

    # -- constructors -------------------------------------------------------
    @classmethod
    def bernoulli(cls, rho: DensityMatrix | np.ndarray, label: str = "") -> "SourceFamily":
        return cls(SourceKind.bernoulli, _density(rho), label=label)

    @classmethod
    def from_ensemble(cls, ensemble: SignalEnsemble, label: str = "") -> "SourceFamily":
        """Bernoulli source emitting independent signals from ``ensemble``."""
        return cls.bernoulli(ensemble_to_density(ensemble), label=label)

    @classmethod
    def commuting(
        cls,
        rho: DensityMatrix | np.ndarray,
        basis: np.ndarray | None = None,
        label: str = "",
    ) -> "SourceFamily":
        rho = _density(rho)
        projectors = commuting_projectors(rho, basis)
        r = sum(np.kron(p, p) for p in projectors)
        lead, trail = r_residuals(rho.matrix, r)
        if max(lead, trail) > R_TOL:
            hint = "" if basis is not None else "; pass an eigenbasis for degenerate ρ"
            raise InvalidSource(
                f"commuting R violates the marginal conditions "
                f"(lead {lead:.3e}, trail {trail:.3e}){hint}"
            )
        return cls(
            SourceKind.commuting_r,
            rho,
            r_matrix=r,
            projectors=tuple(projectors),
            label=label,
        )

    @classmethod
    def pauli(cls, a: float, b: float, c: float, label: str = "") -> "SourceFamily":
        rho = DensityMatrix(pauli_rho(a))
        r = build_pauli_r(a, b, c)
        return cls(
            SourceKind.pauli_r,
            rho,
            r_matrix=r,
            pauli_params=(float(a), float(b), float(c)),
            label=label,
        )

    @classmethod
    def explicit(
        cls,
        rho: DensityMatrix | np.ndarray,
        r_matrix: np.ndarray,
        strict: bool = True,
        label: str = "",
    ) -> "SourceFamily":
        """User-supplied R; ``strict=False`` keeps a violating R as a control."""
        rho = _density(rho)
        r = as_matrix(r_matrix)
        if r.shape != (rho.dim**2, rho.dim**2):
            raise InvalidSource(
                f"R must be {rho.dim**2}x{rho.dim**2}, got {r.shape}"
            )
        lead, trail = r_residuals(rho.matrix, r)
        if max(lead, trail) > R_TOL:
            if strict:
                raise InvalidSource(
                    f"R violates the marginal conditions "
                    f"(lead {lead:.3e}, trail {trail:.3e})"
                )
            log.warning(
                "keeping R that violates the marginal conditions "
                "(lead %.3e, trail %.3e)",
                lead,
                trail,
            )
        return cls(SourceKind.explicit_r, rho, r_matrix=r, label=label)


def _density(rho: DensityMatrix | np.ndarray) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
