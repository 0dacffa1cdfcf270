from __future__ import annotations

"""Entropy inequalities tying the measured (classical) source to the quantum one."""

import numpy as np
from pydantic import BaseModel

from entropy import shannon, von_neumann
from linalg import xlogx
from sources import DensityMatrix, SourceFamily, SourceKind, block_density
from utils.budget import Budgets

from .cylinder import cylinder_measure, shannon_block_entropy
from .pom import Pom

BOUND_TOL = 1e-9


class BoundMargin(BaseModel):
    check: str
    n: int
    lhs: float
    rhs: float
    margin: float
    passed: bool


def jensen_bound_check(r_density: DensityMatrix | np.ndarray, p: Pom) -> BoundMargin:
    """Σ t_j log t_j ≤ tr(R log R) + Σ t_j log tr(A_j), with t_j = tr(A_j R)."""
    rho = r_density.matrix if isinstance(r_density, DensityMatrix) else r_density
    t = p.outcome_probabilities(rho)
    lhs = float(np.sum(xlogx(t, floor=0.0)))
    r_log_r = -von_neumann(r_density)
    traces = p.traces
    mask = t > 0
    rhs = r_log_r + float(np.sum(t[mask] * np.log(traces[mask])))
    margin = rhs - lhs
    return BoundMargin(
        check="jensen", n=1, lhs=lhs, rhs=rhs, margin=margin, passed=margin >= -BOUND_TOL
    )


def quantum_bound_check(
    f: SourceFamily, p: Pom, n: int, budgets: Budgets | None = None
) -> BoundMargin:
    """H_n^A − H_n(Π) + n Σ_k tr(A_k ρ) log tr(A_k) ≥ 0 at block length ``n``."""
    h_classical = shannon_block_entropy(cylinder_measure(f, p, n, budgets))
    h_quantum = von_neumann(block_density(f, n, budgets))
    weights = p.outcome_probabilities(f.rho.matrix)
    mask = weights > 0
    correction = n * float(np.sum(weights[mask] * np.log(p.traces[mask])))
    margin = h_classical - h_quantum + correction
    return BoundMargin(
        check="measured-entropy",
        n=n,
        lhs=h_quantum - correction,
        rhs=h_classical,
        margin=margin,
        passed=margin >= -BOUND_TOL,
    )


def classical_entropy_rate(f: SourceFamily, p: Pom) -> float | None:
    """h_A in closed form where the measured process is simple enough.

    Bernoulli sources give an i.i.d. process with letter law tr(A_k ρ). A
    commuting-R source with rank-1 spectral projectors P_j gives a mixture of
    i.i.d. processes with weights λ_j and letter laws tr(A_k P_j); its rate is
    the λ-average of the component entropies.
    """
    if f.kind is SourceKind.bernoulli:
        return shannon(p.outcome_probabilities(f.rho.matrix))
    if f.kind is SourceKind.commuting_r and f.projectors is not None:
        rate = 0.0
        for proj in f.projectors:
            lam = float(np.trace(f.rho.matrix @ proj).real)
            rate += lam * shannon(p.outcome_probabilities(proj))
        return rate
    return None
