import numpy as np
import pytest

from ergodicity import (
    Cylinder,
    Local,
    SupportEscape,
    TimeAverageProbe,
    bernoulli_factorization_check,
    check_contraction,
    classical_time_average_check,
    factorization_deviation,
    merge,
    time_average_expectation,
    time_average_sweep,
    window_average,
)
from linalg import SIGMA_1, SIGMA_3, identity, kron
from measurement import computational_pom, eigenbasis_pom
from sources import SourceFamily

RHO = np.diag([0.75, 0.25])


# ---------------------------------------------------------------------------
# quantum time averages
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("shifts", [1, 2, 4, 8])
def test_bernoulli_probe_deviation_is_three_quarters_over_n(shifts):
    f = SourceFamily.bernoulli(RHO)
    z = Local(SIGMA_3, 0)
    probe = TimeAverageProbe(z, Local(identity(2), 0), z, n_window=8, shifts=shifts)
    res = time_average_expectation(f, probe)
    assert res.tau_a == pytest.approx(0.5)
    assert res.tau_bc == pytest.approx(0.5)
    assert res.deviation == pytest.approx(0.75 / shifts, abs=1e-12)
    assert res.bound == pytest.approx(1.0 / shifts)
    assert res.within_bound


def test_commuting_source_does_not_decorrelate():
    f = SourceFamily.commuting(RHO)
    z = Local(SIGMA_3, 0)
    rows = time_average_sweep(f, z, Local(identity(2), 0), z, 8, [2, 4, 8])
    # every z_k equals z_0 on this source, so the average stays at τ(z²) = 1
    assert [r.value for r in rows] == pytest.approx([1.0, 1.0, 1.0])
    assert all(r.deviation == pytest.approx(0.75) for r in rows)
    assert not rows[-1].within_bound


def test_sweep_is_ordered_and_thread_independent():
    f = SourceFamily.pauli(0.2, 0.05, 0.05)
    a = Local(kron(SIGMA_3, SIGMA_1), 0)
    b = Local(SIGMA_1, 1)
    c = Local(SIGMA_3, 0)
    serial = time_average_sweep(f, a, b, c, 6, [1, 3, 5])
    threaded = time_average_sweep(f, a, b, c, 6, [1, 3, 5], workers=3)
    assert [r.shifts for r in threaded] == [1, 3, 5]
    assert [r.value for r in serial] == [r.value for r in threaded]


def test_probe_leaving_window_raises():
    z = Local(SIGMA_3, 2)
    probe = TimeAverageProbe(z, Local(identity(2), 0), z, n_window=4, shifts=3)
    with pytest.raises(SupportEscape):
        probe.validate(2)
    with pytest.raises(SupportEscape):
        TimeAverageProbe(Local(SIGMA_3), Local(SIGMA_3, 4), Local(SIGMA_3), 4, 1).validate(2)


def test_overlapping_shift_count():
    probe = TimeAverageProbe(
        Local(kron(SIGMA_3, SIGMA_3), 0), Local(SIGMA_3, 3), Local(SIGMA_3, 0), 8, 6
    )
    # shift 0 meets site 0; shifts 2 and 3 meet site 3
    assert probe.overlapping_shifts(2) == 3


def test_window_average_contracts():
    avg = window_average(Local(SIGMA_3, 0), 4, 4, 2)
    np.testing.assert_allclose(np.diag(avg)[0], 1.0)
    probe = TimeAverageProbe(Local(SIGMA_1), Local(identity(2)), Local(SIGMA_1), 5, 5)
    result = check_contraction(probe, 2)
    assert result.passed
    assert result.average_norm == pytest.approx(1.0)


def test_bernoulli_factorization():
    f = SourceFamily.bernoulli(np.diag([0.5, 0.3, 0.2]))
    verdict = bernoulli_factorization_check(f, trials=6, seed=5)
    assert verdict.trials == 6
    assert verdict.passed


def test_factorization_fails_for_correlated_source():
    f = SourceFamily.commuting(RHO)
    dev = factorization_deviation(f, Local(SIGMA_3, 0), Local(SIGMA_3, 2), 4)
    assert dev == pytest.approx(0.75)
    with pytest.raises(ValueError):
        bernoulli_factorization_check(f, trials=1, seed=0)
    with pytest.raises(ValueError):
        factorization_deviation(f, Local(SIGMA_3, 0), Local(SIGMA_3, 0), 4)


# ---------------------------------------------------------------------------
# classical time averages
# ---------------------------------------------------------------------------
def test_cylinder_parsing_and_merge():
    c = Cylinder.parse("1*2", offset=1)
    assert c.symbols == (1, None, 2)
    assert c.end == 4
    assert merge(c, Cylinder.parse([None, 1])) == [None, 1, None, 2]
    assert merge(c, Cylinder.parse("2", offset=1)) is None
    assert Cylinder.parse("**").is_full()
    assert Cylinder.parse("10-*-2").symbols == (10, None, 2)
    with pytest.raises(ValueError):
        Cylinder.parse("1", offset=-1)


def test_cylinder_matches_zero_based_messages():
    msgs = np.array([[0, 1, 0], [0, 0, 1]])
    np.testing.assert_array_equal(Cylinder.parse("*2").matches(msgs), [True, False])


def test_bernoulli_classical_average_exact():
    f = SourceFamily.bernoulli(RHO)
    c = Cylinder.parse("1")
    res = classical_time_average_check(f, eigenbasis_pom(RHO), c, c, 50)
    assert res.method == "exact"
    assert res.product == pytest.approx(0.5625)
    assert res.deviation == pytest.approx(0.00375, abs=1e-12)
    assert res.std_error == 0.0


@pytest.mark.parametrize("n", [1, 10, 40])
def test_commuting_classical_average_never_mixes(n):
    f = SourceFamily.commuting(RHO)
    res = classical_time_average_check(
        f, computational_pom(2), Cylinder.parse("1"), Cylinder.parse("1", offset=1), n
    )
    assert res.deviation == pytest.approx(0.1875, abs=1e-12)


def test_monte_carlo_average_within_error_bar():
    f = SourceFamily.bernoulli(RHO)
    c = Cylinder.parse("1")
    exact = classical_time_average_check(f, eigenbasis_pom(RHO), c, c, 20)
    mc = classical_time_average_check(
        f, eigenbasis_pom(RHO), c, c, 20, samples=3000, seed=11, workers=2
    )
    assert mc.method == "monte-carlo"
    assert mc.samples == 3000
    assert abs(mc.estimate - exact.estimate) <= 4 * mc.std_error
    again = classical_time_average_check(f, eigenbasis_pom(RHO), c, c, 20, samples=3000, seed=11)
    assert again.estimate == mc.estimate
