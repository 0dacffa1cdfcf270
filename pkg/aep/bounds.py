from __future__ import annotations

"""Dimension and expectation bounds for the typical subspace."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, computed_field

from linalg import level_pauli, marginal, trace_norm
from linalg.random import random_reflection_frame
from sources import SourceFamily, block_density
from utils.budget import DEFAULT_BUDGETS, Budgets

from .projector import TypicalProjector

log = logging.getLogger(__name__)

AEP_TOL = 1e-9
# Trace-norm (worst observable) deviation needs an SVD; keep it to small blocks.
WORST_CASE_DIM = 1024
# Rank of the random reflection observables C = V diag(±1) V†.
OBSERVABLE_RANK = 8


class CountBounds(BaseModel):
    """log-form bounds on |L|; margins ≥ 0 mean the bound holds."""

    orientation: str  # "standard" | "displayed"
    upper_margin: float
    lower_margin: float

    @computed_field
    @property
    def passed(self) -> bool:
        return min(self.upper_margin, self.lower_margin) >= -AEP_TOL


class DimensionVerdict(BaseModel):
    lower: float  # (log m − δ)/log d
    middle: float  # log dim S_n/(n log d) − h/log d
    upper: float  # (log M + δ)/log d
    statement_margin: float
    # middle − lower may fall short by log μ(L)/(n log d) at finite n; the upper
    # side needs no slack
    finite_n_margin: float
    log_dim: float
    sandwich_lower: float  # n log m + log|L|
    sandwich_upper: float  # n log M + log|L|
    sandwich_margin: float
    count_standard: CountBounds
    count_displayed: CountBounds

    @computed_field
    @property
    def statement_passed(self) -> bool:
        return self.statement_margin >= -AEP_TOL

    @computed_field
    @property
    def finite_n_passed(self) -> bool:
        return self.finite_n_margin >= -AEP_TOL

    @computed_field
    @property
    def sandwich_passed(self) -> bool:
        return self.sandwich_margin >= -AEP_TOL

    @computed_field
    @property
    def passed(self) -> bool:
        return self.finite_n_passed and self.sandwich_passed


class ObservableDeviation(BaseModel):
    name: str
    deviation: float
    bound: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.deviation <= self.bound


class ExpectationVerdict(BaseModel):
    epsilon: float
    atypical_mass: float
    canonical: list[ObservableDeviation]
    random_trials: int
    random_max_deviation: float
    worst_case_deviation: float | None = None

    @computed_field
    @property
    def max_deviation(self) -> float:
        return max([c.deviation for c in self.canonical] + [self.random_max_deviation])

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.canonical) and (
            self.random_max_deviation <= self.epsilon + AEP_TOL
        )


def dimension_bounds(
    subspace_dim: int,
    typical_count: int,
    rank_bounds: tuple[int, int],
    n: int,
    delta: float,
    epsilon: float,
    h_ref: float,
    log_d: float,
    typical_mass: float = 1.0,
) -> DimensionVerdict:
    """Statement form (log dim S_n/(n log d)), its finite-n form, the rank
    sandwich, and both orientations of the |L| count bounds.

    ``typical_mass`` is μ(L); the finite-n form widens the lower side by
    log μ(L)/(n log d), which makes it hold at every n.
    """
    if subspace_dim < 1:
        raise ValueError("typical subspace is empty; dimension bounds need dim >= 1")
    m, big_m = rank_bounds
    if m < 1:
        raise ValueError(f"rank bounds must be positive, got {rank_bounds}")
    log_dim = math.log(subspace_dim)
    lower = (math.log(m) - delta) / log_d
    middle = log_dim / (n * log_d) - h_ref / log_d
    upper = (math.log(big_m) + delta) / log_d
    log_count = math.log(typical_count) if typical_count else -math.inf
    sandwich_lower = n * math.log(m) + log_count
    sandwich_upper = n * math.log(big_m) + log_count
    log_keep = math.log1p(-epsilon)
    slack = math.log(typical_mass) / (n * log_d) if typical_mass > 0 else -math.inf
    return DimensionVerdict(
        lower=lower,
        middle=middle,
        upper=upper,
        statement_margin=min(middle - lower, upper - middle),
        finite_n_margin=min(middle - lower - slack, upper - middle),
        log_dim=log_dim,
        sandwich_lower=sandwich_lower,
        sandwich_upper=sandwich_upper,
        sandwich_margin=min(log_dim - sandwich_lower, sandwich_upper - log_dim),
        count_standard=CountBounds(
            orientation="standard",
            upper_margin=n * (h_ref + delta) - log_count,
            lower_margin=log_count - log_keep - n * (h_ref - delta),
        ),
        count_displayed=CountBounds(
            orientation="displayed",
            upper_margin=log_keep + n * (h_ref + delta) - log_count,
            lower_margin=log_count - n * (h_ref - delta),
        ),
    )


def _local_probes(d: int) -> list[tuple[str, np.ndarray]]:
    return [(name, level_pauli(name, d)) for name in ("x", "y", "z")]


def deviation_operator(
    f: SourceFamily, projector: TypicalProjector, budgets: Budgets | None = None
) -> np.ndarray:
    """X = P Π_n − Π_n, so that τ(CP) − τ(C) = tr(C X)."""
    pi = block_density(f, projector.n, budgets).matrix
    if projector.diagonal is not None:
        return (projector.diagonal - 1.0)[:, None] * pi
    return projector.dense(budgets) @ pi - pi


def check_expectation_preservation(
    f: SourceFamily,
    projector: TypicalProjector,
    n: int,
    epsilon: float,
    trials: int,
    seed: int,
    budgets: Budgets | None = None,
    workers: int = 1,
) -> ExpectationVerdict:
    """|tr(C P Π_n) − tr(C Π_n)| ≤ ε‖C‖ for the identity, single-site probes on
    both boundary sites, and ``trials`` random norm-1 complex Hermitian
    observables V diag(±1) V† with V a Haar isometry of rank ``OBSERVABLE_RANK``."""
    budgets = budgets or DEFAULT_BUDGETS
    if projector.n != n:
        raise ValueError(f"projector has n={projector.n}, expected {n}")
    budgets.check_dim(f.d, n)
    x = deviation_operator(f, projector, budgets)
    d, dim = f.d, f.d**n
    atypical = float(-np.trace(x).real)
    if atypical > epsilon:
        log.warning("atypical mass %.6g exceeds ε=%.6g; bound not expected", atypical, epsilon)

    canonical = [
        ObservableDeviation(name="identity", deviation=abs(atypical), bound=epsilon + AEP_TOL)
    ]
    for site in sorted({0, n - 1}):
        reduced = marginal(x, n, d, site, 1)
        for name, local in _local_probes(d):
            canonical.append(
                ObservableDeviation(
                    name=f"{name}@{site}",
                    deviation=abs(complex(np.trace(local @ reduced))),
                    bound=epsilon + AEP_TOL,
                )
            )

    k = min(OBSERVABLE_RANK, dim)

    def trial(i: int) -> float:
        v, s = random_reflection_frame(dim, k, np.random.default_rng([seed, i]))
        diag = np.einsum("ij,ij->j", v.conj(), x @ v)
        return abs(complex(np.dot(s, diag)))

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            deviations = list(pool.map(trial, range(trials)))
    else:
        deviations = [trial(i) for i in range(trials)]

    worst = trace_norm(x) if dim <= WORST_CASE_DIM else None
    return ExpectationVerdict(
        epsilon=epsilon,
        atypical_mass=atypical,
        canonical=canonical,
        random_trials=trials,
        random_max_deviation=max(deviations, default=0.0),
        worst_case_deviation=worst,
    )


def worst_case_deviation(
    f: SourceFamily, projector: TypicalProjector, budgets: Budgets | None = None
) -> float:
    """sup over ‖C‖ ≤ 1 of |τ(CP) − τ(C)|, i.e. the trace norm of X."""
    return trace_norm(deviation_operator(f, projector, budgets))
