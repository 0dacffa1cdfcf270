from __future__ import annotations

"""Sufficient positivity certificates for the Pauli source."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from pydantic import BaseModel, computed_field

from linalg import PSD_FLOOR
from sources import SourceFamily, verify_positivity
from utils.budget import Budgets

from .decomposition import AnRecursion, a_n_recursion, build_omega_q

log = logging.getLogger(__name__)

NORM_TOL = 1e-9
CLOSED_FORM_TOL = 1e-12


class PositivityCertificate(BaseModel):
    a: float
    b: float
    c: float
    n_max: int
    w: float
    w_closed_form: float  # (1+|a|)/2
    q: float
    threshold: float  # 2(1−w)/(1+w)²
    bound_rhs: float | None  # None when q(1+w)/2 ≥ 1
    a_n_norms: list[float]
    recursion: AnRecursion
    bound_violations: list[int]  # n with ‖A_{n−1}‖ ≤ 1 but ‖A_n‖ > RHS
    min_eigenvalues: list[float]  # min eig Π_n, n = 1..n_max

    @computed_field
    @property
    def certified(self) -> bool:
        return self.q < self.threshold

    @computed_field
    @property
    def positivity_passed(self) -> bool:
        return all(v >= PSD_FLOOR for v in self.min_eigenvalues)

    @computed_field
    @property
    def norms_bounded(self) -> bool:
        return all(x <= 1.0 + NORM_TOL for x in self.a_n_norms)

    @computed_field
    @property
    def consistent(self) -> bool:
        """False when a certified point disagrees with the numerics."""
        if not self.certified:
            return True
        return (
            self.positivity_passed
            and self.norms_bounded
            and not self.bound_violations
            and self.bound_rhs is not None
            and self.bound_rhs <= 1.0 + NORM_TOL
            and self.recursion.singular_at is None
        )


def _bound_violations(recursion: AnRecursion, rhs: float | None) -> list[int]:
    if rhs is None:
        return []
    rows = recursion.rows
    return [
        cur.n
        for prev, cur in zip(rows, rows[1:])
        if prev.norm <= 1.0 + NORM_TOL and cur.norm > rhs + NORM_TOL
    ]


def certify(
    a: float, b: float, c: float, n_max: int, budgets: Budgets | None = None
) -> PositivityCertificate:
    oq = build_omega_q(a, b, c)
    f = SourceFamily.pauli(a, b, c)
    positivity = verify_positivity(f, n_max, budgets)
    recursion = a_n_recursion(f, n_max, budgets, stop_on_singular=True)
    rhs = oq.bound_rhs
    cert = PositivityCertificate(
        a=a,
        b=b,
        c=c,
        n_max=n_max,
        w=oq.w,
        w_closed_form=(1.0 + abs(a)) / 2.0,
        q=oq.q,
        threshold=oq.threshold,
        bound_rhs=rhs,
        a_n_norms=recursion.norms,
        recursion=recursion,
        bound_violations=_bound_violations(recursion, rhs),
        min_eigenvalues=[row.min_eigenvalue for row in positivity.rows],
    )
    if abs(cert.w - cert.w_closed_form) > CLOSED_FORM_TOL:
        log.warning("‖ω‖ = %.15g differs from (1+|a|)/2 = %.15g", cert.w, cert.w_closed_form)
    if not cert.consistent:
        log.warning("certificate for (a,b,c)=(%g,%g,%g) contradicts the numerics", a, b, c)
    return cert


def grid_certify(
    a_values: Sequence[float],
    b_values: Sequence[float],
    c_values: Sequence[float],
    n_max: int,
    budgets: Budgets | None = None,
    workers: int = 1,
) -> list[PositivityCertificate]:
    """Certificates for the product grid, ordered a-major regardless of ``workers``."""
    points = list(itertools.product(a_values, b_values, c_values))

    def run(point: tuple[float, float, float]) -> PositivityCertificate:
        return certify(*point, n_max=n_max, budgets=budgets)

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, points))
    return [run(p) for p in points]
