import math

import numpy as np
import pytest
from scipy.stats import binom

from aep import (
    AepParams,
    NotProjective,
    build_aep_report,
    check_expectation_preservation,
    dimension_bounds,
    reference_rate,
    sampled_atypical_fraction,
    typical_projector,
    typical_split,
    worst_case_deviation,
)
from entropy import shannon
from measurement import (
    computational_pom,
    cylinder_measure,
    eigenbasis_pom,
    explicit_pom,
    random_projective_pom,
    sample_messages,
    uniform_pom,
)
from sources import SourceFamily

RHO = np.diag([0.75, 0.25])
H = shannon(np.array([0.75, 0.25]))


def bernoulli_atypical_mass(n: int, delta: float) -> float:
    """Exact μ(U) for the diag(.75, .25) letter law: words depend only on the count k of 1s."""
    k = np.arange(n + 1)
    f_n = -(k * math.log(0.75) + (n - k) * math.log(0.25)) / n
    return float(binom.pmf(k, n, 0.75)[np.abs(f_n - H) > delta].sum())


def test_typical_words_at_sixteen():
    f = SourceFamily.bernoulli(RHO)
    p = eigenbasis_pom(RHO)
    params = AepParams(n=16, delta=0.1, h_ref=H)
    split = typical_split(cylinder_measure(f, p, 16), params)
    counts = {word.count("1") for word in split.words()}
    assert counts == {11, 12, 13}
    assert split.typical_count == math.comb(16, 11) + math.comb(16, 12) + math.comb(16, 13)
    assert split.atypical_mass == pytest.approx(0.3868, abs=5e-4)
    assert split.atypical_mass == pytest.approx(bernoulli_atypical_mass(16, 0.1), abs=1e-10)
    assert split.typical_mass + split.atypical_mass == pytest.approx(1.0)


@pytest.mark.parametrize("n,expected", [(8, 0.6885), (12, 0.316)])
def test_atypical_mass_at_smaller_n(n, expected):
    f = SourceFamily.bernoulli(RHO)
    split = typical_split(
        cylinder_measure(f, eigenbasis_pom(RHO), n), AepParams(n=n, delta=0.1, h_ref=H)
    )
    assert split.atypical_mass == pytest.approx(expected, abs=1e-3)


def test_params_must_match_measure():
    m = cylinder_measure(SourceFamily.bernoulli(RHO), eigenbasis_pom(RHO), 3)
    with pytest.raises(ValueError):
        typical_split(m, AepParams(n=4, delta=0.1, h_ref=H))


def test_report_uses_closed_form_rate_and_sandwich():
    f = SourceFamily.bernoulli(RHO)
    report, split, projector = build_aep_report(f, eigenbasis_pom(RHO), 10, 0.1)
    assert report.h_ref_origin == "closed-form"
    assert report.params.h_ref == pytest.approx(H)
    assert report.subspace_dim == split.typical_count
    assert projector.dense_rank() == report.subspace_dim
    assert report.dim_verdict.sandwich_passed
    assert report.dim_verdict.sandwich_margin == pytest.approx(0.0, abs=1e-12)
    assert report.expectation_verdict is not None


def test_report_estimates_rate_for_pauli_source():
    f = SourceFamily.pauli(0.2, 0.05, 0.05)
    h, origin = reference_rate(f, computational_pom(2), 4)
    assert origin == "estimate"
    assert 0 < h < math.log(2)


def test_non_projective_pom_has_no_subspace():
    f = SourceFamily.bernoulli(RHO)
    report, _, projector = build_aep_report(f, uniform_pom(2), 4, 0.1, h_ref=math.log(2))
    assert projector is None
    assert report.subspace_dim == 0
    assert report.dim_verdict is None
    with pytest.raises(NotProjective):
        typical_projector(uniform_pom(2), np.ones((2,) * 4, dtype=bool))


def test_diagonal_expectation_preservation():
    f = SourceFamily.bernoulli(RHO)
    p = eigenbasis_pom(RHO)
    split = typical_split(cylinder_measure(f, p, 6), AepParams(n=6, delta=0.3, h_ref=H))
    projector = typical_projector(p, split)
    verdict = check_expectation_preservation(f, projector, 6, 0.5, trials=8, seed=3)
    assert verdict.atypical_mass == pytest.approx(split.atypical_mass, abs=1e-12)
    assert verdict.canonical[0].name == "identity"
    # P and Π_n commute here, so the worst observable is the atypical projector itself
    assert verdict.worst_case_deviation == pytest.approx(split.atypical_mass, abs=1e-10)
    assert verdict.random_max_deviation <= verdict.worst_case_deviation + 1e-12
    assert verdict.passed is (split.atypical_mass <= 0.5)


def test_dense_projector_for_rotated_pom():
    f = SourceFamily.pauli(0.3, 0.05, 0.02)
    p = random_projective_pom(2, np.random.default_rng(6))
    report, split, projector = build_aep_report(f, p, 5, 0.2, epsilon=0.9, trials=4)
    idempotency, asymmetry = projector.residuals()
    assert idempotency < 1e-10
    assert asymmetry < 1e-12
    assert projector.dense_rank() == projector.rank == split.typical_count
    worst = worst_case_deviation(f, projector)
    assert report.expectation_verdict.random_max_deviation <= worst + 1e-12


def test_dimension_bounds_orientations():
    v = dimension_bounds(
        subspace_dim=6748,
        typical_count=6748,
        rank_bounds=(1, 1),
        n=16,
        delta=0.1,
        epsilon=0.4,
        h_ref=H,
        log_d=math.log(2),
    )
    assert v.count_standard.upper_margin == pytest.approx(16 * (H + 0.1) - math.log(6748))
    assert v.count_standard.passed
    assert v.statement_passed
    with pytest.raises(ValueError):
        dimension_bounds(0, 0, (1, 1), 4, 0.1, 0.1, H, math.log(2))


@pytest.mark.parametrize("delta,check", [(0.02, "binomial"), (0.05, "small")])
def test_sampled_fraction_at_two_thousand(delta, check):
    n, count = 2000, 1000
    f = SourceFamily.bernoulli(RHO)
    msgs = sample_messages(f, eigenbasis_pom(RHO), n, count, seed=2024)
    sampled = sampled_atypical_fraction(msgs, H, delta)
    exact = bernoulli_atypical_mass(n, delta)
    if check == "binomial":
        assert exact == pytest.approx(0.06, abs=0.02)
        se = math.sqrt(exact * (1 - exact) / count)
        assert abs(sampled.atypical_fraction - exact) <= 4 * se
    else:
        assert exact < 0.01
        assert sampled.atypical_fraction < 0.01


# ---------------------------------------------------------------------------
# rank bounds and the finite-n dimension form
# ---------------------------------------------------------------------------
def test_zero_pom_element_does_not_enter_rank_bounds():
    p = explicit_pom([np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.zeros((2, 2))])
    assert p.rank_bounds == (1, 1)
    report, split, _ = build_aep_report(SourceFamily.bernoulli(RHO), p, 4, 0.1)
    assert report.rank_bounds == (1, 1)
    assert report.subspace_dim == split.typical_count
    assert report.dim_verdict is not None
    assert report.dim_verdict.sandwich_passed
    with pytest.raises(ValueError):
        dimension_bounds(4, 4, (0, 1), 4, 0.1, 0.1, H, math.log(2))


def test_finite_n_form_holds_where_the_statement_form_falls_short():
    f = SourceFamily.bernoulli(RHO)
    report, split, _ = build_aep_report(f, eigenbasis_pom(RHO), 8, 0.1)
    # only the words with six 1s are typical
    assert split.typical_count == math.comb(8, 6)
    assert split.typical_mass == pytest.approx(math.comb(8, 6) * 0.75**6 * 0.25**2)
    v = report.dim_verdict
    assert v.statement_margin == pytest.approx(
        (math.log(28) / 8 - H + 0.1) / math.log(2), abs=1e-12
    )
    assert not v.statement_passed
    assert v.finite_n_passed
    assert v.passed


def test_statement_form_at_twelve():
    f = SourceFamily.bernoulli(RHO)
    report, split, _ = build_aep_report(f, eigenbasis_pom(RHO), 12, 0.1)
    assert split.typical_count == 781
    assert report.dim_verdict.statement_passed
    assert report.dim_verdict.finite_n_passed


# ---------------------------------------------------------------------------
# expectation preservation at full size
# ---------------------------------------------------------------------------
def test_expectation_preservation_at_twelve_sites():
    n, delta = 12, 0.1
    f = SourceFamily.bernoulli(RHO)
    mass = bernoulli_atypical_mass(n, delta)
    report, split, projector = build_aep_report(
        f, eigenbasis_pom(RHO), n, delta, epsilon=mass + 1e-9, trials=50
    )
    assert projector.dim == 4096
    idempotency, asymmetry = projector.residuals()
    assert idempotency <= 1e-10
    assert asymmetry <= 1e-10
    v = report.expectation_verdict
    assert v is not None
    assert v.random_trials == 50
    assert v.atypical_mass == pytest.approx(mass, abs=1e-10)
    assert v.canonical[0].deviation == pytest.approx(mass, abs=1e-10)
    assert v.random_max_deviation <= mass + 1e-9
    assert v.passed


def test_random_observables_follow_the_seed():
    f = SourceFamily.pauli(0.3, 0.05, 0.02)
    p = random_projective_pom(2, np.random.default_rng(6))
    # keep the words that open with symbol 1
    mask = np.zeros((2,) * 5, dtype=bool)
    mask[0] = True
    projector = typical_projector(p, mask)
    runs = [
        check_expectation_preservation(f, projector, 5, 0.9, trials=4, seed=seed)
        for seed in (0, 1, 0)
    ]
    assert runs[0].random_max_deviation != runs[1].random_max_deviation
    assert runs[0].random_max_deviation == runs[2].random_max_deviation
