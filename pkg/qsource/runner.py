from __future__ import annotations

"""Scenario execution: config in, ordered rows and invariant verdicts out."""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel, Field, computed_field

from aep import build_aep_report, sampled_atypical_fraction
from certify import appendix_form_residual, grid_certify
from entropy import (
    ENTROPY_TOL,
    block_entropy_sequence,
    check_bound_chain,
    check_monotone_ratio,
    check_subadditivity,
    closed_form_rate,
    klein_gap,
)
from ergodicity import (
    Cylinder,
    Local,
    TimeAverageProbe,
    bernoulli_factorization_check,
    check_contraction,
    classical_time_average_check,
    time_average_sweep,
)
from linalg import level_pauli
from linalg.random import random_density
from measurement import (
    BOUND_TOL,
    Pom,
    jensen_bound_check,
    quantum_bound_check,
    random_pom,
    random_projective_pom,
    sample_messages,
)
from sources import (
    SourceFamily,
    SourceKind,
    verify_classical,
    verify_consistency,
    verify_positivity,
)
from usage import AbstractMeter, NullMeter
from utils.env import int_env

from .config import ExperimentConfig, Scenario

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Dense window averages for the contraction check stay below this dimension.
CONTRACTION_MAX_DIM = 1024
KLEIN_MAX_DIM = 16


class Invariant(BaseModel):
    name: str
    passed: bool
    margin: float | None = None
    asserted: bool = True  # False: reported evidence, not a guaranteed property


class ScenarioResult(BaseModel):
    scenario: Scenario
    family: str | None = None
    pom: str | None = None
    columns: list[tuple[str, str]]  # (name, description)
    rows: list[dict[str, Any]] = Field(default_factory=list)
    invariants: list[Invariant] = Field(default_factory=list)
    details: dict[str, Any] = Field(default_factory=dict)

    @computed_field
    @property
    def all_passed(self) -> bool:
        return all(i.passed for i in self.invariants if i.asserted)


def default_workers() -> int:
    return int_env("QSOURCE_WORKERS", 1) or 1


def map_points(
    fn: Callable[[T], R],
    points: Sequence[T],
    workers: int,
    meter: AbstractMeter,
    scenario: Scenario,
) -> list[R]:
    """Evaluate ``fn`` per point; results keep the order of ``points``."""

    def timed(point: T) -> R:
        start = time.perf_counter()
        outcome = "error"
        try:
            result = fn(point)
            outcome = "ok"
            return result
        finally:
            meter.record(scenario.value, outcome, time.perf_counter() - start)

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(timed, points))
    return [timed(p) for p in points]


def _worst(values: Iterable[float]) -> float:
    return min(values, default=math.inf)


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------
def run_consistency(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    n_max = max(cfg.n_max, 2)
    report = map_points(
        lambda n: verify_consistency(f, n, cfg.budgets), [n_max], 1, meter, cfg.scenario
    )[0]
    rows = [r.model_dump() for r in report.rows]
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        columns=[
            ("n", "block length"),
            ("leading_residual", "‖tr_first Π_n − Π_{n−1}‖"),
            ("trailing_residual", "‖tr_last Π_n − Π_{n−1}‖"),
            ("stationarity_residual", "‖tr_first Π_n − tr_last Π_n‖"),
            ("hermitian_residual", "max |Π_n − Π_n†| before symmetrization"),
        ],
        rows=rows,
        invariants=[
            Invariant(
                name="consistency",
                passed=report.passed,
                margin=report.tolerance - report.worst_residual,
                asserted=f.kind is not SourceKind.explicit_r,
            )
        ],
        details={
            "report": report.model_dump(),
            "classical": verify_classical(f, n_max, cfg.budgets).model_dump(),
        },
    )


def run_positivity(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    report = map_points(
        lambda n: verify_positivity(f, n, cfg.budgets), [cfg.n_max], 1, meter, cfg.scenario
    )[0]
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        columns=[
            ("n", "block length"),
            ("min_eigenvalue", "smallest eigenvalue of Π_n"),
            ("passed", "min_eigenvalue ≥ floor"),
        ],
        rows=[r.model_dump() for r in report.rows],
        invariants=[
            Invariant(
                name="positivity",
                passed=report.passed,
                margin=_worst(r.min_eigenvalue for r in report.rows) - report.floor,
                asserted=f.kind in (SourceKind.bernoulli, SourceKind.commuting_r),
            )
        ],
        details={"report": report.model_dump()},
    )


def run_entropy_scan(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    report = map_points(
        lambda n: block_entropy_sequence(f, n, cfg.budgets), [cfg.n_max], 1, meter, cfg.scenario
    )[0]
    rate = closed_form_rate(f)
    s_rho = report.von_neumann_signal
    rows = []
    prev = 0.0
    for n, h in enumerate(report.block_entropies, start=1):
        rows.append(
            {
                "n": n,
                "block_entropy": h,
                "ratio": h / n,
                "difference": h - prev,
                "closed_form": None if rate is None else s_rho + (n - 1) * rate,
            }
        )
        prev = h
    invariants = []
    if report.n_max >= 2:
        sub = check_subadditivity(report)
        invariants.append(Invariant(name="subadditivity", passed=sub.passed, margin=sub.worst_margin))
    chain = check_bound_chain(report)
    invariants.append(
        Invariant(
            name="rate-bound-chain",
            passed=chain.passed,
            margin=min(chain.rate_margin, chain.signal_margin),
        )
    )
    mono = check_monotone_ratio(report)
    invariants.append(
        Invariant(
            name="monotone-ratio", passed=mono.passed, margin=-mono.worst_increase, asserted=False
        )
    )
    if rate is not None:
        err = max(abs(r["block_entropy"] - r["closed_form"]) for r in rows)
        invariants.append(
            Invariant(name="closed-form", passed=err <= ENTROPY_TOL, margin=ENTROPY_TOL - err)
        )
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        columns=[
            ("n", "block length"),
            ("block_entropy", "H_n = S(Π_n), nats"),
            ("ratio", "H_n / n"),
            ("difference", "H_n − H_{n−1}"),
            ("closed_form", "S(ρ) + (n−1)·h where h is known, else empty"),
        ],
        rows=rows,
        invariants=invariants,
        details={"report": report.model_dump(), "closed_form_rate": rate},
    )


def _bound_poms(cfg: ExperimentConfig, f: SourceFamily, p: Pom) -> list[Pom]:
    poms = [p]
    for i in range(cfg.random_poms):
        rng = np.random.default_rng(cfg.seed ^ (i + 1))
        if i % 2 == 0:
            q = random_projective_pom(f.d, rng)
            label = f"random-projective#{i}"
        else:
            q = random_pom(f.d, max(2, f.d), rng)
            label = f"random#{i}"
        poms.append(Pom(q.operators, label=label))
    return poms


def run_bound_check(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    poms = _bound_poms(cfg, f, p)

    def per_pom(q: Pom) -> list[dict[str, Any]]:
        out = [{"pom": q.describe(), **jensen_bound_check(f.rho, q).model_dump()}]
        for n in range(1, cfg.n_max + 1):
            out.append({"pom": q.describe(), **quantum_bound_check(f, q, n, cfg.budgets).model_dump()})
        return out

    rows = [row for chunk in map_points(per_pom, poms, workers, meter, cfg.scenario) for row in chunk]

    def klein(i: int) -> dict[str, Any]:
        rng = np.random.default_rng(cfg.seed ^ (0x4B1E + i))
        dim = 2 + i % (KLEIN_MAX_DIM - 1)
        a = random_density(dim, rng)
        gap = klein_gap(a, random_density(dim, rng))
        return {
            "pom": "-",
            "check": "klein",
            "n": dim,
            "lhs": 0.0,
            "rhs": gap,
            "margin": gap,
            "passed": gap >= -BOUND_TOL,
        }

    rows += map_points(klein, list(range(cfg.trials)), workers, meter, cfg.scenario)
    invariants = []
    for check in ("jensen", "measured-entropy", "klein"):
        margins = [r["margin"] for r in rows if r["check"] == check]
        if margins:
            worst = min(margins)
            invariants.append(Invariant(name=check, passed=worst >= -BOUND_TOL, margin=worst))
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        pom=p.describe(),
        columns=[
            ("pom", "measurement label"),
            ("check", "jensen | measured-entropy | klein"),
            ("n", "block length (klein: matrix dimension)"),
            ("lhs", "smaller side of the inequality"),
            ("rhs", "larger side of the inequality"),
            ("margin", "rhs − lhs"),
            ("passed", "margin ≥ −1e-9"),
        ],
        rows=rows,
        invariants=invariants,
    )


def run_aep(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    def point(n: int) -> dict[str, Any]:
        report, _, _ = build_aep_report(
            f, p, n, cfg.delta, cfg.epsilon, cfg.h_ref, cfg.trials, cfg.seed, cfg.budgets
        )
        row: dict[str, Any] = {
            "n": n,
            "delta": cfg.delta,
            "h_ref": report.params.h_ref,
            "h_ref_origin": report.h_ref_origin,
            "typical_count": report.typical_count,
            "atypical_mass": report.atypical_mass,
            "subspace_dim": report.subspace_dim,
            "statement_margin": None,
            "finite_n_margin": None,
            "sandwich_margin": None,
            "max_deviation": None,
            "expectation_passed": None,
            "sampled_fraction": None,
            "sampled_std_error": None,
        }
        if report.dim_verdict is not None:
            row["statement_margin"] = report.dim_verdict.statement_margin
            row["finite_n_margin"] = report.dim_verdict.finite_n_margin
            row["sandwich_margin"] = report.dim_verdict.sandwich_margin
        if report.expectation_verdict is not None:
            row["max_deviation"] = report.expectation_verdict.max_deviation
            row["expectation_passed"] = report.expectation_verdict.passed
        if cfg.samples > 0:
            msgs = sample_messages(f, p, n, cfg.samples, cfg.seed)
            sampled = sampled_atypical_fraction(msgs, report.params.h_ref, cfg.delta)
            row["sampled_fraction"] = sampled.atypical_fraction
            row["sampled_std_error"] = sampled.standard_error
        return {"row": row, "report": report.model_dump()}

    results = map_points(point, cfg.block_lengths, workers, meter, cfg.scenario)
    rows = [r["row"] for r in results]
    invariants = []
    sandwich = [r["sandwich_margin"] for r in rows if r["sandwich_margin"] is not None]
    if sandwich:
        invariants.append(
            Invariant(name="rank-sandwich", passed=min(sandwich) >= -1e-9, margin=min(sandwich))
        )
    statement = [r["statement_margin"] for r in rows if r["statement_margin"] is not None]
    if statement:
        finite = [r["finite_n_margin"] for r in rows if r["finite_n_margin"] is not None]
        invariants.append(
            Invariant(
                name="dimension-rate",
                passed=min(statement) >= -1e-9,
                margin=min(statement),
                asserted=False,
            )
        )
        invariants.append(
            Invariant(
                name="dimension-rate-finite",
                passed=min(finite) >= -1e-9,
                margin=min(finite),
            )
        )
    for r in rows:
        if r["expectation_passed"] is not None:
            invariants.append(
                Invariant(
                    name=f"expectation@n={r['n']}",
                    passed=r["expectation_passed"],
                    margin=cfg.epsilon - r["max_deviation"],
                    asserted=r["atypical_mass"] <= cfg.epsilon,
                )
            )
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        pom=p.describe(),
        columns=[
            ("n", "block length"),
            ("delta", "typicality window δ"),
            ("h_ref", "reference rate, nats"),
            ("h_ref_origin", "given | closed-form | estimate"),
            ("typical_count", "|L_{n,δ}|"),
            ("atypical_mass", "μ(U_{n,δ})"),
            ("subspace_dim", "dim S_n (0 for non-projective POMs)"),
            ("statement_margin", "margin of the log-dimension rate bounds"),
            ("finite_n_margin", "same, lower side widened by log μ(L)/(n log d)"),
            ("sandwich_margin", "margin of n log m + log|L| ≤ log dim S_n ≤ n log M + log|L|"),
            ("max_deviation", "largest |τ(CP) − τ(C)| over the probes"),
            ("expectation_passed", "all probes within ε"),
            ("sampled_fraction", "Monte-Carlo atypical fraction"),
            ("sampled_std_error", "binomial standard error of sampled_fraction"),
        ],
        rows=rows,
        invariants=invariants,
        details={"reports": [r["report"] for r in results]},
    )


def run_ergodicity(
    cfg: ExperimentConfig, f: SourceFamily, p: Pom, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    d, spec = f.d, cfg.probe
    a = Local(level_pauli(spec.a_observable, d), spec.a_site)
    b = Local(level_pauli(spec.b_observable, d), spec.b_site)
    c = Local(level_pauli(spec.c_observable, d), spec.c_site)
    name = f"{spec.a_observable}@{spec.a_site}|{spec.b_observable}@{spec.b_site}|{spec.c_observable}@{spec.c_site}"
    bernoulli = f.kind is SourceKind.bernoulli

    quantum = map_points(
        lambda _: time_average_sweep(
            f, a, b, c, cfg.window, cfg.shifts, name, cfg.budgets, workers
        ),
        [None],
        1,
        meter,
        cfg.scenario,
    )[0]
    rows: list[dict[str, Any]] = [
        {
            "kind": "quantum",
            "probe": q.probe,
            "N": q.shifts,
            "value": q.value,
            "product": q.tau_a * q.tau_bc,
            "deviation": q.deviation,
            "bound": q.bound,
            "std_error": 0.0,
            "within_bound": q.within_bound,
        }
        for q in quantum
    ]

    cyl_c = Cylinder.parse(spec.cylinder_c)
    cyl_d = Cylinder.parse(spec.cylinder_d, spec.cylinder_d_offset)
    classical = map_points(
        lambda n: classical_time_average_check(
            f, p, cyl_c, cyl_d, n, cfg.samples, cfg.seed, workers
        ),
        cfg.shifts,
        1,
        meter,
        cfg.scenario,
    )
    d_sites = set(range(cyl_d.offset, cyl_d.end))
    for res in classical:
        overlapping = sum(
            1 for k in range(res.shifts) if d_sites & set(range(cyl_c.offset + k, cyl_c.end + k))
        )
        bound = overlapping / res.shifts
        rows.append(
            {
                "kind": "classical",
                "probe": f"C={spec.cylinder_c}|D={spec.cylinder_d}@{spec.cylinder_d_offset}",
                "N": res.shifts,
                "value": res.estimate,
                "product": res.product,
                "deviation": res.deviation,
                "bound": bound,
                "std_error": res.std_error,
                "within_bound": res.deviation <= bound + 4 * res.std_error + 1e-10,
            }
        )

    invariants = [
        Invariant(
            name="time-average-bound",
            passed=all(q.within_bound for q in quantum),
            margin=_worst(q.bound - q.deviation for q in quantum),
            asserted=bernoulli,
        ),
        Invariant(
            name="classical-time-average",
            passed=all(r["within_bound"] for r in rows if r["kind"] == "classical"),
            margin=_worst(r["bound"] - r["deviation"] for r in rows if r["kind"] == "classical"),
            asserted=bernoulli,
        ),
    ]
    contraction = [
        check_contraction(TimeAverageProbe(a, b, c, spec.a_site + n, n), d)
        for n in cfg.shifts
        if d ** (spec.a_site + n) <= CONTRACTION_MAX_DIM
    ]
    if contraction:
        invariants.append(
            Invariant(
                name="contraction",
                passed=all(r.passed for r in contraction),
                margin=_worst(r.local_norm - r.average_norm for r in contraction),
            )
        )
    if bernoulli and cfg.trials > 0:
        fact = bernoulli_factorization_check(f, cfg.trials, cfg.seed, budgets=cfg.budgets)
        invariants.append(
            Invariant(name="factorization", passed=fact.passed, margin=-fact.max_deviation)
        )
    return ScenarioResult(
        scenario=cfg.scenario,
        family=f.describe(),
        pom=p.describe(),
        columns=[
            ("kind", "quantum | classical"),
            ("probe", "observables or cylinders"),
            ("N", "number of averaged shifts"),
            ("value", "time average"),
            ("product", "τ(A)τ(B†C) or μ(C)μ(D)"),
            ("deviation", "|value − product|"),
            ("bound", "overlapping shifts / N · norms"),
            ("std_error", "Monte-Carlo standard error (0 when exact)"),
            ("within_bound", "deviation ≤ bound"),
        ],
        rows=rows,
        invariants=invariants,
    )


def run_certify_appendix(
    cfg: ExperimentConfig, f: SourceFamily | None, p: Pom | None, workers: int, meter: AbstractMeter
) -> ScenarioResult:
    grid = cfg.grid
    certs = map_points(
        lambda _: grid_certify(grid.a, grid.b, grid.c, cfg.n_max, cfg.budgets, workers),
        [None],
        1,
        meter,
        cfg.scenario,
    )[0]
    rows = []
    for cert in certs:
        residual = None
        if cert.n_max >= 2 and cert.positivity_passed:
            residual = max(
                appendix_form_residual((cert.a, cert.b, cert.c), n, cfg.budgets)
                for n in range(1, cert.n_max)
            )
        rows.append(
            {
                "a": cert.a,
                "b": cert.b,
                "c": cert.c,
                "w": cert.w,
                "q": cert.q,
                "threshold": cert.threshold,
                "certified": cert.certified,
                "bound_rhs": cert.bound_rhs,
                "max_a_norm": max(cert.a_n_norms, default=None),
                "max_relative_diff": cert.recursion.max_relative_diff,
                "min_eigenvalue": min(cert.min_eigenvalues),
                "positivity_passed": cert.positivity_passed,
                "singular_at": cert.recursion.singular_at,
                "appendix_residual": residual,
                "consistent": cert.consistent,
            }
        )
    w_err = max((abs(c.w - c.w_closed_form) for c in certs), default=0.0)
    rel = max((c.recursion.max_relative_diff for c in certs), default=0.0)
    residuals = [r["appendix_residual"] for r in rows if r["appendix_residual"] is not None]
    invariants = [
        Invariant(name="norm-closed-form", passed=w_err <= 1e-12, margin=1e-12 - w_err),
        Invariant(
            name="soundness",
            passed=all(c.consistent for c in certs),
            margin=_worst(
                min(c.min_eigenvalues) for c in certs if c.certified
            ),
        ),
        Invariant(name="recursion-agreement", passed=rel <= 1e-8, margin=1e-8 - rel),
    ]
    if residuals:
        invariants.append(
            Invariant(
                name="factored-recursion",
                passed=max(residuals) <= 1e-10,
                margin=1e-10 - max(residuals),
            )
        )
    return ScenarioResult(
        scenario=cfg.scenario,
        columns=[
            ("a", "ρ = I/2 + (a/2)σ3"),
            ("b", "coefficient of ω⊗σ1 in R"),
            ("c", "coefficient of ω⊗σ2 in R"),
            ("w", "‖ω‖"),
            ("q", "‖Q‖"),
            ("threshold", "2(1−w)/(1+w)²"),
            ("certified", "q < threshold"),
            ("bound_rhs", "(1 + q/2 + wq/2)·w/(1 − q/2 − wq/2), empty when unbounded"),
            ("max_a_norm", "max_n ‖A_n‖"),
            ("max_relative_diff", "recursion vs definition of A_n, relative"),
            ("min_eigenvalue", "min_n of the smallest eigenvalue of Π_n"),
            ("positivity_passed", "all Π_n ≥ −1e-10"),
            ("singular_at", "first singular Π_n, empty if none"),
            ("appendix_residual", "max_n ‖Π_{n+1} − K-factored form‖"),
            ("consistent", "certificate agrees with the numerics"),
        ],
        rows=rows,
        invariants=invariants,
        details={"certificates": [c.model_dump() for c in certs]},
    )


SCENARIOS: dict[Scenario, Callable[..., ScenarioResult]] = {
    Scenario.consistency: run_consistency,
    Scenario.positivity: run_positivity,
    Scenario.entropy_scan: run_entropy_scan,
    Scenario.bound_check: run_bound_check,
    Scenario.aep: run_aep,
    Scenario.ergodicity: run_ergodicity,
    Scenario.certify_appendix: run_certify_appendix,
}


def run_experiment(
    cfg: ExperimentConfig,
    workers: int | None = None,
    meter: AbstractMeter | None = None,
) -> ScenarioResult:
    """Validate budgets, build the source and POM, then run the scenario.

    Budget and construction errors surface before any block is computed.
    """
    cfg.check_budgets()
    workers = workers or default_workers()
    meter = meter or NullMeter()
    f = p = None
    if cfg.source is not None:
        f = cfg.source.build()
        p = cfg.pom.build(f)
    log.info(
        "running %s on %s (workers=%d)",
        cfg.scenario.value,
        f.describe() if f is not None else "parameter grid",
        workers,
    )
    result = SCENARIOS[cfg.scenario](cfg, f, p, workers, meter)
    failed = [i.name for i in result.invariants if i.asserted and not i.passed]
    if failed:
        log.warning("%s: invariants failed: %s", cfg.scenario.value, ", ".join(failed))
    return result
