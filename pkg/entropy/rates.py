from __future__ import annotations

"""Block entropies H_n, rate estimators and the inequalities they obey."""

import logging
import math

import numpy as np
from pydantic import BaseModel, computed_field

from linalg import apply_spectral, identity, xlogx
from sources import SourceFamily, SourceKind, block_density
from utils.budget import Budgets

from .spectral import von_neumann

log = logging.getLogger(__name__)

ENTROPY_TOL = 1e-9


class EntropyReport(BaseModel):
    family: str
    block_entropies: list[float]  # H_1..H_{n_max}
    von_neumann_signal: float
    log_d: float

    @computed_field
    @property
    def n_max(self) -> int:
        return len(self.block_entropies)

    @computed_field
    @property
    def rate_by_ratio(self) -> float:
        return self.block_entropies[-1] / self.n_max

    @computed_field
    @property
    def rate_by_difference(self) -> float | None:
        if self.n_max < 2:
            return None
        return self.block_entropies[-1] - self.block_entropies[-2]

    def h(self, n: int) -> float:
        return self.block_entropies[n - 1]


class SubadditivityVerdict(BaseModel):
    passed: bool
    worst_margin: float  # min over splits of H_m + H_n − H_{m+n}
    worst_split: tuple[int, int] | None


class BoundChainVerdict(BaseModel):
    """rate estimators ≤ S(ρ) ≤ log d."""

    passed: bool
    rate_margin: float
    signal_margin: float


class MonotoneVerdict(BaseModel):
    """H_n/n non-increasing in n."""

    passed: bool
    worst_increase: float


def block_entropy_sequence(
    f: SourceFamily, n_max: int, budgets: Budgets | None = None
) -> EntropyReport:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    entropies = [von_neumann(block_density(f, n, budgets)) for n in range(1, n_max + 1)]
    report = EntropyReport(
        family=f.describe(),
        block_entropies=entropies,
        von_neumann_signal=von_neumann(f.rho),
        log_d=math.log(f.d),
    )
    for n, h in enumerate(entropies, start=1):
        if h < -ENTROPY_TOL or h > n * report.log_d + ENTROPY_TOL:
            log.warning("H_%d = %.12g outside [0, n log d] for %s", n, h, report.family)
    return report


def check_subadditivity(report: EntropyReport) -> SubadditivityVerdict:
    if report.n_max < 2:
        raise ValueError("subadditivity needs at least two block entropies")
    worst, split = math.inf, None
    for m in range(1, report.n_max):
        for n in range(m, report.n_max - m + 1):
            margin = report.h(m) + report.h(n) - report.h(m + n)
            if margin < worst:
                worst, split = margin, (m, n)
    return SubadditivityVerdict(
        passed=worst >= -ENTROPY_TOL, worst_margin=worst, worst_split=split
    )


def check_bound_chain(report: EntropyReport) -> BoundChainVerdict:
    rates = [report.rate_by_ratio]
    if report.rate_by_difference is not None:
        rates.append(report.rate_by_difference)
    rate_margin = report.von_neumann_signal - max(rates)
    signal_margin = report.log_d - report.von_neumann_signal
    return BoundChainVerdict(
        passed=min(rate_margin, signal_margin) >= -ENTROPY_TOL,
        rate_margin=rate_margin,
        signal_margin=signal_margin,
    )


def check_monotone_ratio(report: EntropyReport) -> MonotoneVerdict:
    ratios = [h / n for n, h in enumerate(report.block_entropies, start=1)]
    increase = max((b - a for a, b in zip(ratios, ratios[1:])), default=0.0)
    return MonotoneVerdict(passed=increase <= ENTROPY_TOL, worst_increase=increase)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------
def commuting_r_closed_form(f: SourceFamily) -> float:
    """h(Π) = −tr((ρ⊗I) R log R) for a commuting-R source."""
    if f.kind is not SourceKind.commuting_r:
        raise ValueError(f"closed form needs a commuting-r source, got {f.kind.value}")
    return _r_log_r_rate(f)


def closed_form_rate(f: SourceFamily) -> float | None:
    """Exact entropy rate when one is known: S(ρ) for Bernoulli, the R form for
    commuting-R sources, ``None`` otherwise."""
    if f.kind is SourceKind.bernoulli:
        return von_neumann(f.rho)
    if f.kind is SourceKind.commuting_r:
        return _r_log_r_rate(f)
    return None


def _r_log_r_rate(f: SourceFamily) -> float:
    r_log_r = apply_spectral(f.transfer_r, xlogx)
    weighted = np.kron(f.rho.matrix, identity(f.d)) @ r_log_r
    return float(-np.trace(weighted).real)
