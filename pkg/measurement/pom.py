from __future__ import annotations

"""Positive operator valued measures (POMs) and the usual ways to build them."""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from pydantic import BaseModel

from linalg import (
    PSD_FLOOR,
    apply_spectral,
    eig_hermitian,
    eigvalsh_desc,
    hermitian_residual,
    identity,
    operator_norm,
    symmetrize,
)
from linalg.random import random_psd, random_unitary
from sources import DensityMatrix

log = logging.getLogger(__name__)

POM_TOL = 1e-10
RANK_TOL = 1e-10


class PomVerdict(BaseModel):
    valid: bool
    r: int
    d: int
    min_eigenvalue: float
    completeness_residual: float  # ‖Σ A_j − I‖
    hermitian_residual: float
    projective: bool
    idempotency_residual: float  # max_j ‖A_j² − A_j‖
    orthogonality_residual: float  # max_{j≠k} ‖A_j A_k‖
    ranks: list[int]


class InvalidPom(ValueError):
    def __init__(self, verdict: PomVerdict) -> None:
        self.verdict = verdict
        super().__init__(
            "operators do not form a POM: "
            f"min eigenvalue {verdict.min_eigenvalue:.3e}, "
            f"‖ΣA_j − I‖ = {verdict.completeness_residual:.3e}, "
            f"hermitian residual {verdict.hermitian_residual:.3e}"
        )


def validate_pom(operators: "Pom | Sequence[np.ndarray] | np.ndarray") -> PomVerdict:
    ops = operators.operators if isinstance(operators, Pom) else _stack(operators)
    r, d = ops.shape[0], ops.shape[1]
    herm = max(hermitian_residual(a) for a in ops)
    if herm > POM_TOL:
        return PomVerdict(
            valid=False,
            r=r,
            d=d,
            min_eigenvalue=float("nan"),
            completeness_residual=operator_norm(ops.sum(axis=0) - identity(d)),
            hermitian_residual=herm,
            projective=False,
            idempotency_residual=float("nan"),
            orthogonality_residual=float("nan"),
            ranks=[],
        )
    ops = np.stack([symmetrize(a) for a in ops])
    spectra = [eigvalsh_desc(a) for a in ops]
    min_eig = float(min(s[-1] for s in spectra))
    completeness = operator_norm(ops.sum(axis=0) - identity(d))
    idempotency = max(operator_norm(a @ a - a) for a in ops)
    orthogonality = max(
        (
            operator_norm(ops[j] @ ops[k])
            for j in range(r)
            for k in range(r)
            if j != k
        ),
        default=0.0,
    )
    valid = min_eig >= PSD_FLOOR and completeness <= POM_TOL
    return PomVerdict(
        valid=valid,
        r=r,
        d=d,
        min_eigenvalue=min_eig,
        completeness_residual=completeness,
        hermitian_residual=herm,
        projective=idempotency <= POM_TOL and orthogonality <= POM_TOL,
        idempotency_residual=idempotency,
        orthogonality_residual=orthogonality,
        ranks=[int(np.sum(s > RANK_TOL)) for s in spectra],
    )


@dataclass(frozen=True, eq=False)
class Pom:
    """Operators A_1..A_r (stored as an ``(r, d, d)`` array) with ΣA_j = I."""

    operators: np.ndarray
    label: str = ""
    verdict: PomVerdict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        ops = _stack(self.operators)
        verdict = validate_pom(ops)
        if not verdict.valid:
            raise InvalidPom(verdict)
        object.__setattr__(self, "operators", np.stack([symmetrize(a) for a in ops]))
        object.__setattr__(self, "verdict", verdict)

    @property
    def r(self) -> int:
        return self.operators.shape[0]

    @property
    def d(self) -> int:
        return self.operators.shape[1]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(self.verdict.ranks)

    @property
    def rank_bounds(self) -> tuple[int, int]:
        """(m, M) over the nonzero elements; a zero element never fires."""
        live = [k for k in self.ranks if k > 0]
        return min(live), max(live)

    @property
    def projective(self) -> bool:
        return self.verdict.projective

    @property
    def is_diagonal(self) -> bool:
        off = self.operators * (1 - np.eye(self.d))[None]
        return bool(np.max(np.abs(off), initial=0.0) <= POM_TOL)

    @property
    def traces(self) -> np.ndarray:
        return np.einsum("kii->k", self.operators).real

    def outcome_probabilities(self, rho: np.ndarray) -> np.ndarray:
        """tr(A_k ρ) for each outcome."""
        return np.einsum("kij,ji->k", self.operators, rho).real

    def describe(self) -> str:
        return self.label or f"pom(r={self.r},d={self.d})"


def _stack(operators: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    ops = np.asarray(operators, dtype=complex)
    if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
        raise ValueError(f"expected an (r, d, d) stack of operators, got {ops.shape}")
    return ops


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------
def eigenbasis_pom(rho: DensityMatrix | np.ndarray) -> Pom:
    """Rank-1 projectors onto the eigenvectors of ρ, largest eigenvalue first."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    vecs = eig_hermitian(m).eigenvectors
    return Pom(np.stack([np.outer(v, v.conj()) for v in vecs.T]), label="eigenbasis")


def computational_pom(d: int) -> Pom:
    ops = np.zeros((d, d, d), dtype=complex)
    ops[np.arange(d), np.arange(d), np.arange(d)] = 1.0
    return Pom(ops, label="computational")


def uniform_pom(d: int, r: int | None = None) -> Pom:
    """r copies of I/r (default r = d)."""
    r = r or d
    return Pom(np.stack([identity(d) / r] * r), label="uniform")


def scaled_identity_pom(weights: Sequence[float], d: int) -> Pom:
    return Pom(np.stack([w * identity(d) for w in weights]), label="scaled-identity")


def block_projective_pom(blocks: Sequence[Sequence[int]], d: int) -> Pom:
    """Projectors onto coordinate subspaces, e.g. [[0, 1], [2]] on C³."""
    ops = []
    for block in blocks:
        p = np.zeros((d, d), dtype=complex)
        p[list(block), list(block)] = 1.0
        ops.append(p)
    return Pom(np.stack(ops), label="block-projective")


def random_projective_pom(
    d: int, rng: np.random.Generator, r: int | None = None
) -> Pom:
    """Projectors onto a Haar-random basis, split into ``r`` contiguous groups."""
    r = r or d
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r}, d={d}")
    u = random_unitary(d, rng)
    groups = np.array_split(np.arange(d), r)
    ops = [u[:, g] @ u[:, g].conj().T for g in groups]
    return Pom(np.stack(ops), label="random-projective")


def random_pom(d: int, r: int, rng: np.random.Generator) -> Pom:
    """Generic POM: A_j = S^{-1/2} G_j S^{-1/2} with S = Σ G_j."""
    gs = [random_psd(d, rng) for _ in range(r)]
    s_inv_half = apply_spectral(sum(gs), lambda lam: lam**-0.5)
    ops = [s_inv_half @ g @ s_inv_half for g in gs]
    return Pom(np.stack(ops), label="random")


def explicit_pom(operators: Sequence[np.ndarray]) -> Pom:
    return Pom(_stack(operators), label="explicit")
