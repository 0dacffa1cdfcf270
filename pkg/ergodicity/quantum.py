from __future__ import annotations

"""Finite-window time averages of shifted observables.

All shifts happen inside one window of ``n_window`` sites; a probe is only
valid while every translate of A stays inside the window.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, computed_field

from linalg import (
    DimensionMismatch,
    apply_local,
    as_matrix,
    marginal,
    operator_norm,
    site_count,
)
from linalg.random import random_hermitian
from sources import SourceFamily, SourceKind, block_density
from utils.budget import Budgets

log = logging.getLogger(__name__)

FACTORIZATION_TOL = 1e-10
CONTRACTION_TOL = 1e-10


class SupportEscape(DimensionMismatch):
    """A shifted observable would leave the finite window."""


@dataclass(frozen=True, eq=False)
class Local:
    """An operator on sites ``offset..offset+k-1``."""

    op: np.ndarray
    offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "op", as_matrix(self.op))

    def k(self, d: int) -> int:
        return site_count(self.op.shape[0], d)

    def sites(self, d: int) -> set[int]:
        return set(range(self.offset, self.offset + self.k(d)))


@dataclass(frozen=True, eq=False)
class TimeAverageProbe:
    a_obs: Local
    b_obs: Local
    c_obs: Local
    n_window: int
    shifts: int
    name: str = "probe"

    def validate(self, d: int) -> None:
        if self.shifts < 1:
            raise ValueError("need at least one shift")
        last = self.a_obs.offset + self.a_obs.k(d) + self.shifts - 1
        if last > self.n_window:
            raise SupportEscape(
                f"α^{self.shifts - 1}(A) reaches site {last}, window has {self.n_window}"
            )
        for label, obs in (("B", self.b_obs), ("C", self.c_obs)):
            if obs.offset < 0 or obs.offset + obs.k(d) > self.n_window:
                raise SupportEscape(f"{label} leaves the {self.n_window}-site window")

    def overlapping_shifts(self, d: int) -> int:
        """Number of shifts k for which α^k(A) meets supp(B) ∪ supp(C)."""
        fixed = self.b_obs.sites(d) | self.c_obs.sites(d)
        k_a = self.a_obs.k(d)
        return sum(
            1
            for k in range(self.shifts)
            if fixed & set(range(self.a_obs.offset + k, self.a_obs.offset + k + k_a))
        )


class TimeAverageResult(BaseModel):
    family: str
    probe: str
    shifts: int
    value: float  # Re (1/N) Σ_k τ(B† α^k(A) C)
    tau_a: float
    tau_bc: float
    deviation: float
    bound: float  # overlapping shifts / N · ‖A‖‖B‖‖C‖

    @computed_field
    @property
    def within_bound(self) -> bool:
        return self.deviation <= self.bound + FACTORIZATION_TOL


def time_average_expectation(
    f: SourceFamily, probe: TimeAverageProbe, budgets: Budgets | None = None
) -> TimeAverageResult:
    """|(1/N)Σ_k τ(B† α^k(A) C) − τ(A) τ(B†C)| inside one window."""
    d, n = f.d, probe.n_window
    probe.validate(d)
    pi = block_density(f, n, budgets).matrix
    a, b, c = probe.a_obs, probe.b_obs, probe.c_obs
    k_a = a.k(d)
    # Y = C Π B†, so τ(B† X C) = tr(X Y)
    y = apply_local(c.op, pi, c.offset, n, d, side="left")
    y = apply_local(b.op.conj().T, y, b.offset, n, d, side="right")
    terms = [
        complex(np.trace(a.op @ marginal(y, n, d, a.offset + k, k_a)))
        for k in range(probe.shifts)
    ]
    value = complex(np.mean(terms))
    tau_a = complex(np.trace(a.op @ marginal(pi, n, d, a.offset, k_a)))
    tau_bc = complex(np.trace(y))
    deviation = abs(value - tau_a * tau_bc)
    norms = operator_norm(a.op) * operator_norm(b.op) * operator_norm(c.op)
    bound = probe.overlapping_shifts(d) / probe.shifts * norms
    return TimeAverageResult(
        family=f.describe(),
        probe=probe.name,
        shifts=probe.shifts,
        value=value.real,
        tau_a=tau_a.real,
        tau_bc=tau_bc.real,
        deviation=deviation,
        bound=bound,
    )


class ContractionResult(BaseModel):
    average_norm: float
    local_norm: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.average_norm <= self.local_norm + CONTRACTION_TOL


def window_average(a_obs: Local, n_window: int, shifts: int, d: int) -> np.ndarray:
    """⟨A⟩_N = (1/N) Σ_k α^k(A), embedded in the window."""
    k_a = a_obs.k(d)
    if a_obs.offset + k_a + shifts - 1 > n_window:
        raise SupportEscape(f"{shifts} shifts of A leave the {n_window}-site window")
    dim = d**n_window
    out = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for k in range(shifts):
        out += apply_local(a_obs.op, eye, a_obs.offset + k, n_window, d, side="left")
    out /= shifts
    return out


def check_contraction(probe: TimeAverageProbe, d: int) -> ContractionResult:
    """‖⟨A⟩_N‖ ≤ ‖A‖."""
    avg = window_average(probe.a_obs, probe.n_window, probe.shifts, d)
    return ContractionResult(
        average_norm=operator_norm(avg), local_norm=operator_norm(probe.a_obs.op)
    )


# ---------------------------------------------------------------------------
# Bernoulli factorization
# ---------------------------------------------------------------------------
class FactorizationVerdict(BaseModel):
    trials: int
    max_deviation: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.max_deviation <= FACTORIZATION_TOL


def factorization_deviation(
    f: SourceFamily, a: Local, b: Local, n_window: int, budgets: Budgets | None = None
) -> float:
    """|τ(AB) − τ(A)τ(B)| for local observables in one window."""
    d = f.d
    if a.sites(d) & b.sites(d):
        raise ValueError("factorization needs disjoint supports")
    pi = block_density(f, n_window, budgets).matrix
    ab = apply_local(b.op, pi, b.offset, n_window, d, side="left")
    ab = apply_local(a.op, ab, a.offset, n_window, d, side="left")
    tau_ab = complex(np.trace(ab))
    tau_a = complex(np.trace(a.op @ marginal(pi, n_window, d, a.offset, a.k(d))))
    tau_b = complex(np.trace(b.op @ marginal(pi, n_window, d, b.offset, b.k(d))))
    return abs(tau_ab - tau_a * tau_b)


def bernoulli_factorization_check(
    f: SourceFamily,
    trials: int,
    seed: int,
    n_window: int = 4,
    budgets: Budgets | None = None,
) -> FactorizationVerdict:
    """Random Hermitian pairs on disjoint one- or two-site supports."""
    if f.kind is not SourceKind.bernoulli:
        raise ValueError(f"factorization holds for Bernoulli sources, got {f.kind.value}")
    d = f.d
    worst = 0.0
    for i in range(trials):
        rng = np.random.default_rng(seed ^ i)
        k_a, k_b = (int(k) for k in rng.integers(1, 3, size=2))
        if k_a + k_b > n_window:
            k_a = k_b = 1
        cut = int(rng.integers(k_a, n_window - k_b + 1))
        a = Local(random_hermitian(d**k_a, rng), offset=int(rng.integers(0, cut - k_a + 1)))
        b = Local(random_hermitian(d**k_b, rng), offset=int(rng.integers(cut, n_window - k_b + 1)))
        worst = max(worst, factorization_deviation(f, a, b, n_window, budgets))
    return FactorizationVerdict(trials=trials, max_deviation=worst)


def time_average_sweep(
    f: SourceFamily,
    a: Local,
    b: Local,
    c: Local,
    n_window: int,
    shifts: Sequence[int],
    name: str = "probe",
    budgets: Budgets | None = None,
    workers: int = 1,
) -> list[TimeAverageResult]:
    """One row per N, in the order given."""
    block_density(f, n_window, budgets)
    probes = [TimeAverageProbe(a, b, c, n_window, int(s), name) for s in shifts]

    def run(probe: TimeAverageProbe) -> TimeAverageResult:
        return time_average_expectation(f, probe, budgets)

    if workers > 1 and len(probes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, probes))
    return [run(p) for p in probes]
