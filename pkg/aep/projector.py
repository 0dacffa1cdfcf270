from __future__ import annotations

"""The projector onto the typical subspace, P = Σ_{x∈L} A_{x_1}⊗…⊗A_{x_n}."""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from linalg import hermitian_residual, operator_norm
from measurement import Pom
from utils.budget import DEFAULT_BUDGETS, Budgets

from .typical import TypicalSplit

log = logging.getLogger(__name__)


class NotProjective(ValueError):
    """Typical projectors need a POM of mutually orthogonal projections."""


def _contract(mask: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Σ_x mask[x] factors[x_1] ⊗ … ⊗ factors[x_n], site axes appended in order."""
    t = mask
    for _ in range(mask.ndim):
        t = np.tensordot(t, factors, axes=([0], [0]))
    return t


@dataclass(frozen=True, eq=False)
class TypicalProjector:
    """Implicit typical projector: the word mask plus the per-site POM factors."""

    pom: Pom
    typical: np.ndarray  # bool, (r,)*n

    @property
    def n(self) -> int:
        return self.typical.ndim

    @property
    def dim(self) -> int:
        return self.pom.d**self.n

    @cached_property
    def rank(self) -> int:
        """dim S_n = Σ_{x∈L} Π_j rank(A_{x_j})."""
        ranks = np.asarray(self.pom.ranks, dtype=float)
        return int(round(float(_contract(self.typical.astype(float), ranks))))

    @cached_property
    def diagonal(self) -> np.ndarray | None:
        """Diagonal of P when every POM element is diagonal, else ``None``."""
        if not self.pom.is_diagonal:
            return None
        diag = np.einsum("kii->ki", self.pom.operators).real
        return _contract(self.typical.astype(float), diag).reshape(-1)

    def dense(self, budgets: Budgets | None = None) -> np.ndarray:
        (budgets or DEFAULT_BUDGETS).check_dim(self.pom.d, self.n)
        if self.diagonal is not None:
            return np.diag(self.diagonal).astype(complex)
        n, dim = self.n, self.dim
        t = _contract(self.typical.astype(complex), self.pom.operators)
        # axes are (i1, j1, i2, j2, ...); rows first, then columns
        perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
        return t.transpose(perm).reshape(dim, dim)

    def residuals(self, budgets: Budgets | None = None) -> tuple[float, float]:
        """(‖P² − P‖, max |P − P†|)."""
        if self.diagonal is not None:
            p = self.diagonal
            return float(np.max(np.abs(p * p - p), initial=0.0)), 0.0
        p = self.dense(budgets)
        return operator_norm(p @ p - p), hermitian_residual(p)

    def dense_rank(self, budgets: Budgets | None = None) -> int:
        """Rank read off the spectrum of the assembled projector."""
        if self.diagonal is not None:
            return int(np.sum(self.diagonal > 0.5))
        return int(np.linalg.matrix_rank(self.dense(budgets), tol=1e-8))


def typical_projector(p: Pom, split: TypicalSplit | np.ndarray) -> TypicalProjector:
    if not p.projective:
        raise NotProjective(
            f"{p.describe()} is not projective "
            f"(idempotency {p.verdict.idempotency_residual:.2e}, "
            f"orthogonality {p.verdict.orthogonality_residual:.2e})"
        )
    mask = split.typical if isinstance(split, TypicalSplit) else np.asarray(split, bool)
    if mask.shape[0] != p.r:
        raise ValueError(f"word mask has alphabet {mask.shape[0]}, POM has r={p.r}")
    return TypicalProjector(pom=p, typical=mask)
