import threading

import numpy as np
import pytest

from linalg import SIGMA_3, identity, kron, min_eigenvalue, partial_trace
from linalg.random import random_density
from sources import (
    BlockStore,
    DensityMatrix,
    InvalidSource,
    PositivityViolation,
    ShiftedObservable,
    SignalEnsemble,
    SourceFamily,
    SourceKind,
    block_density,
    build_commuting_r,
    build_pauli_r,
    ensemble_to_density,
    expectation,
    r_residuals,
    verify_classical,
    verify_commuting_conditions,
    verify_consistency,
    verify_positivity,
)
from utils.budget import BudgetExceeded, Budgets

RHO = np.diag([0.75, 0.25])


# ---------------------------------------------------------------------------
# density matrices and ensembles
# ---------------------------------------------------------------------------
def test_density_rejects_bad_trace_and_negative_spectrum():
    with pytest.raises(InvalidSource, match="trace"):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidSource, match="eigenvalue"):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidSource, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_ensemble_to_density_non_orthogonal_signals():
    s = 1 / np.sqrt(2)
    ens = SignalEnsemble.from_lists([[1, 0], [s, s]], [0.5, 0.5])
    rho = ensemble_to_density(ens)
    np.testing.assert_allclose(rho.matrix, [[0.75, 0.25], [0.25, 0.25]], atol=1e-12)
    assert rho.trace == pytest.approx(1.0)


def test_ensemble_validation():
    with pytest.raises(InvalidSource, match="norm"):
        SignalEnsemble.from_lists([[1, 1]], [1.0])
    with pytest.raises(InvalidSource, match="sum"):
        SignalEnsemble.from_lists([[1, 0], [0, 1]], [0.5, 0.6])
    with pytest.raises(InvalidSource, match="subspace"):
        SignalEnsemble.from_lists([[1, 0, 0], [0, 1, 0]], [0.5, 0.5])


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------
def test_bernoulli_blocks_are_tensor_powers():
    f = SourceFamily.bernoulli(RHO)
    np.testing.assert_allclose(block_density(f, 3).matrix, kron(RHO, RHO, RHO), atol=1e-14)


def test_commuting_source_is_perfectly_correlated():
    f = SourceFamily.commuting(RHO)
    pi = block_density(f, 3).matrix
    expected = np.zeros((8, 8))
    expected[0, 0], expected[7, 7] = 0.75, 0.25
    np.testing.assert_allclose(pi, expected, atol=1e-14)
    assert verify_commuting_conditions(f).satisfied


def test_commuting_degenerate_rho_needs_basis():
    with pytest.raises(InvalidSource, match="eigenbasis"):
        SourceFamily.commuting(identity(2) / 2)
    f = SourceFamily.commuting(identity(2) / 2, basis=identity(2))
    assert f.kind is SourceKind.commuting_r
    assert max(r_residuals(f.rho.matrix, f.r_matrix)) < 1e-12


def test_pauli_r_satisfies_marginal_conditions():
    a, b, c = 0.3, 0.1, -0.05
    r = build_pauli_r(a, b, c)
    rho = 0.5 * identity(2) + 0.5 * a * SIGMA_3
    lead, trail = r_residuals(rho, r)
    assert lead < 1e-14
    assert trail < 1e-14


def test_pauli_rejects_pure_rho():
    with pytest.raises(InvalidSource):
        SourceFamily.pauli(1.0, 0.1, 0.1)


def test_explicit_r_strict_and_control():
    bad = 1.2 * np.kron(identity(2), identity(2) / 2)
    with pytest.raises(InvalidSource, match="marginal"):
        SourceFamily.explicit(identity(2) / 2, bad)
    control = SourceFamily.explicit(identity(2) / 2, bad, strict=False)
    report = verify_consistency(control, 3)
    assert not report.passed
    assert report.rows[0].trailing_residual == pytest.approx(0.1, abs=1e-12)


def test_explicit_r_shape_check():
    with pytest.raises(InvalidSource, match="4x4"):
        SourceFamily.explicit(RHO, identity(2))


# ---------------------------------------------------------------------------
# consistency and positivity
# ---------------------------------------------------------------------------
@pytest.mark.parametrize(
    "family",
    [
        SourceFamily.bernoulli(RHO),
        SourceFamily.commuting(RHO),
        SourceFamily.pauli(0.2, 0.05, 0.05),
        SourceFamily.commuting(random_density(3, np.random.default_rng(7))),
    ],
    ids=["bernoulli", "commuting", "pauli", "commuting-qutrit"],
)
def test_consistency_holds(family):
    report = verify_consistency(family, 4)
    assert report.passed
    assert all(r.stationarity_residual < 1e-10 for r in report.rows)


def test_pauli_loses_positivity_at_two():
    f = SourceFamily.pauli(0.0, 0.9, 0.9)
    report = verify_positivity(f, 4)
    assert report.first_failure == 2
    assert report.rows[0].passed


def test_small_pauli_stays_positive():
    report = verify_positivity(SourceFamily.pauli(0.0, 0.05, 0.05), 6)
    assert report.passed


def test_explicit_source_raises_on_negative_block():
    r = build_pauli_r(0.0, 0.9, 0.9)
    f = SourceFamily.explicit(identity(2) / 2, r)
    with pytest.raises(PositivityViolation) as exc:
        block_density(f, 3)
    assert exc.value.n == 2


def test_block_budget():
    f = SourceFamily.bernoulli(RHO)
    with pytest.raises(BudgetExceeded) as exc:
        block_density(f, 5, Budgets(max_dim=16))
    assert exc.value.budget == "max_dim"


def test_blocks_are_cached_and_partial_traces_agree():
    f = SourceFamily.pauli(0.1, 0.05, 0.0)
    pi4 = block_density(f, 4)
    assert len(f.blocks) == 4
    assert block_density(f, 4) is pi4
    pi3 = block_density(f, 3).matrix
    np.testing.assert_allclose(partial_trace(pi4.matrix, (8, 2), "trailing"), pi3, atol=1e-12)
    assert min_eigenvalue(pi4.matrix) > 0


def test_concurrent_block_requests_build_once():
    f = SourceFamily.pauli(0.1, 0.05, 0.05)
    out = []
    threads = [threading.Thread(target=lambda: out.append(block_density(f, 5))) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(b is out[0] for b in out)


def test_block_store_evicts_large_blocks():
    store = BlockStore()
    for n in range(1, 5):
        store.put(n, DensityMatrix(identity(2**n) / 2**n, validate=False), 1e-16 * n)
    store.evict_above(2)
    assert len(store) == 2
    assert store.nearest_below(4)[0] == 2
    assert store.asymmetry(3) == 0.0


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------
def test_shift_invariance_of_expectation():
    f = SourceFamily.pauli(0.3, 0.1, 0.1)
    pi = block_density(f, 4)
    zz = kron(SIGMA_3, SIGMA_3)
    obs = ShiftedObservable(zz, 0, 4)
    values = [expectation(pi, obs.shifted(s)) for s in range(3)]
    assert values[1] == pytest.approx(values[0], abs=1e-12)
    assert values[2] == pytest.approx(values[0], abs=1e-12)
    assert expectation(pi, obs) == pytest.approx(np.trace(obs.dense() @ pi.matrix), abs=1e-12)


def test_observable_outside_window():
    with pytest.raises(ValueError):
        ShiftedObservable(SIGMA_3, 0, 2).shifted(2)


# ---------------------------------------------------------------------------
# builders and classicality
# ---------------------------------------------------------------------------
def test_commuting_r_builders():
    np.testing.assert_allclose(build_commuting_r(DensityMatrix(RHO)), np.diag([1, 0, 0, 1]))
    np.testing.assert_allclose(build_commuting_r(DensityMatrix(identity(2) / 2)), identity(4))
    r = build_commuting_r(DensityMatrix(np.diag([0.5, 0.3, 0.2])))
    assert np.flatnonzero(np.diag(r)).tolist() == [0, 4, 8]


def test_pauli_r_degenerate_cases():
    np.testing.assert_allclose(build_pauli_r(0, 0, 0), identity(4) / 2)
    np.testing.assert_allclose(build_pauli_r(0.5, 0, 0), np.diag([0.75, 0.25, 0.75, 0.25]))
    pauli = block_density(SourceFamily.pauli(0.5, 0.0, 0.0), 3).matrix
    np.testing.assert_allclose(pauli, kron(RHO, RHO, RHO), atol=1e-14)


def test_expectation_examples():
    pi3 = block_density(SourceFamily.bernoulli(RHO), 3)
    assert expectation(pi3, ShiftedObservable(SIGMA_3, 0, 3)) == pytest.approx(0.5)
    assert expectation(pi3, ShiftedObservable(identity(2), 2, 3)) == pytest.approx(1.0)
    pi2 = block_density(SourceFamily.bernoulli(RHO), 2)
    assert expectation(pi2, ShiftedObservable(np.diag([1, 0]), 1, 2)) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        expectation(pi2, ShiftedObservable(SIGMA_3, 0, 3))


def test_classical_families_are_flagged():
    assert verify_classical(SourceFamily.bernoulli(RHO), 3).classical
    assert verify_classical(SourceFamily.commuting(RHO), 3).classical
    verdict = verify_classical(SourceFamily.pauli(0.2, 0.05, 0.05), 3)
    assert not verdict.classical
    assert verdict.off_diagonal[0] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "family",
    [
        SourceFamily.bernoulli(RHO),
        SourceFamily.commuting(RHO),
        SourceFamily.pauli(0.3, 0.05, 0.05),
    ],
    ids=["bernoulli", "commuting", "pauli"],
)
def test_consistency_holds_up_to_eight_sites(family):
    report = verify_consistency(family, 8)
    assert [r.n for r in report.rows] == list(range(2, 9))
    assert max(max(r.leading_residual, r.trailing_residual) for r in report.rows) <= 1e-10


def test_transfer_tensor_refuses_broken_trailing_trace():
    bad = 1.2 * np.kron(identity(2), identity(2) / 2)
    control = SourceFamily.explicit(identity(2) / 2, bad, strict=False)
    with pytest.raises(InvalidSource, match="tr₂R"):
        control.transfer_r4
    assert SourceFamily.pauli(0.3, 0.05, 0.05).transfer_r4.shape == (2, 2, 2, 2)
