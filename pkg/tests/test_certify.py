import numpy as np
import pytest

from certify import (
    SingularBlock,
    a_n_recursion,
    appendix_form_residual,
    build_omega_q,
    certify,
    grid_certify,
    s_operator,
)
from sources import InvalidSource, SourceFamily


def test_omega_q_norms_at_a_zero():
    oq = build_omega_q(0.0, 0.05, 0.05)
    assert oq.w == pytest.approx(0.5)
    assert oq.q == pytest.approx(2 * np.hypot(0.05, 0.05), rel=1e-12)
    assert oq.q == pytest.approx(0.1414, abs=1e-4)
    assert oq.threshold == pytest.approx(4 / 9)


@pytest.mark.parametrize("a", [-0.6, -0.3, 0.0, 0.3, 0.8])
def test_norms_match_closed_forms(a):
    b, c = 0.03, -0.02
    omega, q_matrix, w, q = build_omega_q(a, b, c)
    assert w == pytest.approx((1 + abs(a)) / 2, abs=1e-12)
    assert q == pytest.approx(2 * np.hypot(b, c) / (1 - abs(a)), rel=1e-10)
    assert omega.shape == q_matrix.shape == (2, 2)


def test_bound_rhs_undefined_for_large_q():
    oq = build_omega_q(0.0, 0.5, 0.5)
    assert oq.q == pytest.approx(1.414, abs=1e-3)
    assert oq.bound_rhs is None


def test_invalid_a():
    with pytest.raises(InvalidSource):
        build_omega_q(1.0, 0.0, 0.0)


def test_s_operator_shape():
    oq = build_omega_q(0.1, 0.02, 0.0)
    assert s_operator(oq, 3).shape == (8, 8)
    with pytest.raises(ValueError):
        s_operator(oq, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_factored_recursion_reproduces_blocks(n):
    assert appendix_form_residual((0.2, 0.05, -0.03), n) < 1e-12


def test_factored_recursion_needs_pauli_source():
    with pytest.raises(ValueError):
        appendix_form_residual(SourceFamily.bernoulli(np.diag([0.5, 0.5])), 2)


def test_a_n_recursion_agrees_with_definition():
    rec = a_n_recursion((0.0, 0.05, 0.05), 6)
    assert [r.n for r in rec.rows] == [1, 2, 3, 4, 5, 6]
    assert rec.max_relative_diff < 1e-8
    assert all(r.agrees for r in rec.rows)
    assert rec.rows[0].s_norm is None
    assert rec.rows[1].s_norm <= rec.rows[1].s_bound + 1e-12
    assert max(rec.norms) <= 1.0


def test_a_n_recursion_singular_block():
    with pytest.raises(SingularBlock) as exc:
        a_n_recursion((0.0, 1.0, 0.0), 3)
    assert exc.value.n == 2
    rec = a_n_recursion((0.0, 1.0, 0.0), 3, stop_on_singular=True)
    assert rec.singular_at == 2
    assert len(rec.rows) == 1


def test_certified_point():
    cert = certify(0.0, 0.05, 0.05, 6)
    assert cert.certified
    assert cert.positivity_passed
    assert cert.norms_bounded
    assert cert.bound_violations == []
    assert cert.consistent
    assert cert.w == pytest.approx(cert.w_closed_form)


def test_uncertified_point_is_still_consistent():
    cert = certify(0.0, 0.5, 0.5, 4)
    assert not cert.certified
    assert cert.bound_rhs is None
    assert cert.consistent


def test_grid_is_fully_certified_and_ordered():
    a_vals, bc = [-0.3, 0.0, 0.3], [0.0, 0.02, 0.04]
    certs = grid_certify(a_vals, bc, bc, n_max=5, workers=4)
    assert len(certs) == 27
    assert [(x.a, x.b, x.c) for x in certs[:3]] == [(-0.3, 0.0, 0.0), (-0.3, 0.0, 0.02), (-0.3, 0.0, 0.04)]
    assert max(x.q for x in certs) == pytest.approx(0.1616, abs=1e-4)
    assert all(x.certified and x.consistent for x in certs)
