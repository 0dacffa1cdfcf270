from __future__ import annotations

"""Consistency, stationarity and positivity diagnostics for source families."""

import logging

import numpy as np
from pydantic import BaseModel, computed_field

from linalg import (
    PSD_FLOOR,
    commutator_norm,
    eig_hermitian,
    identity,
    min_eigenvalue,
    operator_norm,
    partial_trace,
)
from utils.budget import Budgets

from .blocks import block_density
from .family import SourceFamily

log = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-10


class ConsistencyRow(BaseModel):
    n: int
    leading_residual: float
    trailing_residual: float
    stationarity_residual: float
    hermitian_residual: float


class ConsistencyReport(BaseModel):
    family: str
    tolerance: float = CONSISTENCY_TOL
    rows: list[ConsistencyRow]

    @computed_field
    @property
    def worst_residual(self) -> float:
        return max(
            (max(r.leading_residual, r.trailing_residual) for r in self.rows),
            default=0.0,
        )

    @computed_field
    @property
    def passed(self) -> bool:
        return self.worst_residual <= self.tolerance


class PositivityRow(BaseModel):
    n: int
    min_eigenvalue: float
    passed: bool


class PositivityReport(BaseModel):
    family: str
    floor: float = PSD_FLOOR
    rows: list[PositivityRow]

    @computed_field
    @property
    def first_failure(self) -> int | None:
        return next((r.n for r in self.rows if not r.passed), None)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.first_failure is None


class CommutingConditions(BaseModel):
    """Extra conditions on R under which every Π_n is automatically positive."""

    r_min_eigenvalue: float
    rho_commutator: float  # ‖[ρ⊗I, R]‖
    shift_commutator: float  # ‖[I⊗R, R⊗I]‖

    @computed_field
    @property
    def satisfied(self) -> bool:
        return (
            self.r_min_eigenvalue >= PSD_FLOOR
            and self.rho_commutator <= CONSISTENCY_TOL
            and self.shift_commutator <= CONSISTENCY_TOL
        )


def verify_consistency(
    f: SourceFamily, n_max: int, budgets: Budgets | None = None
) -> ConsistencyReport:
    """Residuals of both boundary partial traces against Π_{n−1}, n = 2..n_max."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    d = f.d
    rows = []
    for n in range(2, n_max + 1):
        pi = block_density(f, n, budgets, check_positivity=False).matrix
        prev = block_density(f, n - 1, budgets, check_positivity=False).matrix
        lead = partial_trace(pi, (d, d ** (n - 1)), "leading")
        trail = partial_trace(pi, (d ** (n - 1), d), "trailing")
        rows.append(
            ConsistencyRow(
                n=n,
                leading_residual=operator_norm(lead - prev),
                trailing_residual=operator_norm(trail - prev),
                stationarity_residual=operator_norm(lead - trail),
                hermitian_residual=f.blocks.asymmetry(n),
            )
        )
    report = ConsistencyReport(family=f.describe(), rows=rows)
    if not report.passed:
        log.warning(
            "%s is not consistent: worst residual %.3e",
            report.family,
            report.worst_residual,
        )
    return report


def verify_positivity(
    f: SourceFamily, n_max: int, budgets: Budgets | None = None
) -> PositivityReport:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        eig = block_density(f, n, budgets, check_positivity=False).min_eigenvalue
        rows.append(PositivityRow(n=n, min_eigenvalue=eig, passed=eig >= PSD_FLOOR))
    report = PositivityReport(family=f.describe(), rows=rows)
    if report.first_failure is not None:
        log.info("%s loses positivity at n=%d", report.family, report.first_failure)
    return report


def verify_commuting_conditions(f: SourceFamily) -> CommutingConditions:
    """Check R ≥ 0, [ρ⊗I, R] = 0 and [I⊗R, R⊗I] = 0."""
    d = f.d
    r = f.transfer_r
    eye = identity(d)
    return CommutingConditions(
        r_min_eigenvalue=min_eigenvalue(r),
        rho_commutator=commutator_norm(np.kron(f.rho.matrix, eye), r),
        shift_commutator=commutator_norm(np.kron(eye, r), np.kron(r, eye)),
    )


class ClassicalityVerdict(BaseModel):
    """Largest off-diagonal entry of each Π_n in the product eigenbasis of ρ."""

    off_diagonal: list[float]  # n = 1..n_max

    @computed_field
    @property
    def classical(self) -> bool:
        return max(self.off_diagonal, default=0.0) <= CONSISTENCY_TOL


def verify_classical(
    f: SourceFamily, n_max: int, budgets: Budgets | None = None
) -> ClassicalityVerdict:
    """Flag families whose blocks all commute with the product eigenbasis of ρ.

    Such a family is an orthogonal-signal source: every Π_n is a classical
    distribution over eigenvector strings.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    u = eig_hermitian(f.rho.matrix).eigenvectors
    off = []
    basis = identity(1)
    for n in range(1, n_max + 1):
        basis = np.kron(basis, u)
        pi = block_density(f, n, budgets, check_positivity=False).matrix
        rotated = basis.conj().T @ pi @ basis
        off.append(float(np.max(np.abs(rotated - np.diag(np.diag(rotated))))))
    return ClassicalityVerdict(off_diagonal=off)
