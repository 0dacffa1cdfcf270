from __future__ import annotations

"""One-call typical-subspace analysis of a (source, POM, n, δ) point."""

import logging
import math

from pydantic import BaseModel

from measurement import (
    Pom,
    classical_entropy_rate,
    cylinder_measure,
    shannon_block_entropy,
)
from sources import SourceFamily
from utils.budget import DEFAULT_BUDGETS, Budgets

from .bounds import (
    DimensionVerdict,
    ExpectationVerdict,
    check_expectation_preservation,
    dimension_bounds,
)
from .projector import TypicalProjector, typical_projector
from .typical import AepParams, TypicalSplit, typical_split

log = logging.getLogger(__name__)

MAX_LISTED_WORDS = 256


class AepReport(BaseModel):
    family: str
    pom: str
    params: AepParams
    h_ref_origin: str  # "given" | "closed-form" | "estimate"
    typical_count: int
    typical_words: list[str]  # empty when more than MAX_LISTED_WORDS
    atypical_mass: float
    subspace_dim: int
    rank_bounds: tuple[int, int]  # (m, M) over nonzero POM elements
    dim_verdict: DimensionVerdict | None = None
    expectation_verdict: ExpectationVerdict | None = None


def check_dimension_bounds(
    report: AepReport, params: AepParams, log_d: float
) -> DimensionVerdict:
    return dimension_bounds(
        report.subspace_dim,
        report.typical_count,
        report.rank_bounds,
        params.n,
        params.delta,
        params.epsilon,
        params.h_ref,
        log_d,
        typical_mass=1.0 - report.atypical_mass,
    )


def reference_rate(
    f: SourceFamily, p: Pom, n: int, budgets: Budgets | None = None
) -> tuple[float, str]:
    """Exact h_A when known, else the block estimate H_n^A / n."""
    exact = classical_entropy_rate(f, p)
    if exact is not None:
        return exact, "closed-form"
    estimate = shannon_block_entropy(cylinder_measure(f, p, n, budgets)) / n
    log.info("no closed-form h_A for %s; using H_%d^A/%d = %.6g", f.describe(), n, n, estimate)
    return estimate, "estimate"


def build_aep_report(
    f: SourceFamily,
    p: Pom,
    n: int,
    delta: float,
    epsilon: float = 0.1,
    h_ref: float | None = None,
    trials: int = 0,
    seed: int = 0,
    budgets: Budgets | None = None,
    workers: int = 1,
) -> tuple[AepReport, TypicalSplit, TypicalProjector | None]:
    """Typical split, subspace dimension and both verdicts at one point.

    The expectation check runs only when the POM is projective and Π_n fits
    the dense budget.
    """
    budgets = budgets or DEFAULT_BUDGETS
    origin = "given"
    if h_ref is None:
        h_ref, origin = reference_rate(f, p, n, budgets)
    params = AepParams(n=n, delta=delta, epsilon=epsilon, h_ref=h_ref)
    split = typical_split(cylinder_measure(f, p, n, budgets), params)
    projector = typical_projector(p, split) if p.projective else None
    if projector is not None:
        subspace_dim = projector.rank
    else:
        subspace_dim = 0
        log.info("%s is not projective; no typical subspace", p.describe())
    report = AepReport(
        family=f.describe(),
        pom=p.describe(),
        params=params,
        h_ref_origin=origin,
        typical_count=split.typical_count,
        typical_words=(
            list(split.words()) if split.typical_count <= MAX_LISTED_WORDS else []
        ),
        atypical_mass=split.atypical_mass,
        subspace_dim=subspace_dim,
        rank_bounds=p.rank_bounds,
    )
    if subspace_dim >= 1:
        report.dim_verdict = check_dimension_bounds(report, params, math.log(f.d))
    if projector is not None and budgets.dense_fits(f.d, n):
        report.expectation_verdict = check_expectation_preservation(
            f, projector, n, epsilon, trials, seed, budgets, workers
        )
    return report, split, projector
