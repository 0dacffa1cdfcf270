from __future__ import annotations

"""ω/Q split of the Pauli source and the A_n operator recursion.

With S_n = I_{n−2}⊗ω⊗Q the blocks factor as Π_n = K_n(Π_{n−1}⊗ρ), where
K_n = I + ½A_{n−1}⊗Q† + ½S_n†, and A_n = Π_n(I_{n−1}⊗ω)Π_n⁻¹ obeys
A_n = K_n(I_{n−1}⊗ω)K_n⁻¹.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np
import scipy.linalg
from pydantic import BaseModel, computed_field

from linalg import SIGMA_1, SIGMA_2, eig_hermitian, identity, kron, operator_norm
from sources import SourceFamily, SourceKind, block_density, pauli_omega, pauli_rho
from utils.budget import Budgets

log = logging.getLogger(__name__)

# Π_n below this eigenvalue is treated as singular.
SINGULAR_FLOOR = 1e-12
RECURSION_RTOL = 1e-8
ILL_CONDITIONED = 1e10


class SingularBlock(RuntimeError):
    def __init__(self, n: int, eigenvalue: float) -> None:
        self.n = n
        self.eigenvalue = eigenvalue
        super().__init__(
            f"Π_{n} is singular: min eigenvalue {eigenvalue:.6e} < {SINGULAR_FLOOR:g}"
        )


@dataclass(frozen=True, eq=False)
class OmegaQ:
    omega: np.ndarray
    q_matrix: np.ndarray
    w: float
    q: float

    def __iter__(self) -> Iterator[Any]:
        return iter((self.omega, self.q_matrix, self.w, self.q))

    @property
    def threshold(self) -> float:
        """2(1−w)/(1+w)²."""
        return 2.0 * (1.0 - self.w) / (1.0 + self.w) ** 2

    @property
    def bound_rhs(self) -> float | None:
        """(1 + q/2 + wq/2)·w/(1 − q/2 − wq/2); ``None`` when the denominator is ≤ 0."""
        x = 0.5 * self.q * (1.0 + self.w)
        if x >= 1.0:
            return None
        return (1.0 + x) * self.w / (1.0 - x)


def build_omega_q(a: float, b: float, c: float) -> OmegaQ:
    """ω = (a/2)I − σ3/2 and Q = ρ⁻¹(bσ1 + cσ2), with their operator norms."""
    omega = pauli_omega(a)
    rho = pauli_rho(a)
    q_matrix = scipy.linalg.solve(rho, b * SIGMA_1 + c * SIGMA_2, assume_a="her")
    return OmegaQ(
        omega=omega,
        q_matrix=q_matrix,
        w=operator_norm(omega),
        q=operator_norm(q_matrix),
    )


def s_operator(oq: OmegaQ, n: int) -> np.ndarray:
    """S_n = I_{n−2}⊗ω⊗Q on n ≥ 2 sites."""
    if n < 2:
        raise ValueError("S_n needs n >= 2")
    return kron(identity(2 ** (n - 2)), oq.omega, oq.q_matrix)


def _pauli_family(f: SourceFamily | tuple[float, float, float]) -> SourceFamily:
    if isinstance(f, SourceFamily):
        if f.kind is not SourceKind.pauli_r:
            raise ValueError(f"ω/Q decomposition needs a Pauli source, got {f.kind.value}")
        return f
    return SourceFamily.pauli(*f)


def appendix_form_residual(
    f: SourceFamily | tuple[float, float, float], n: int, budgets: Budgets | None = None
) -> float:
    """‖Π_{n+1} − [Π_n⊗ρ + ½(Π_n⊗ρ)S + ½S†(Π_n⊗ρ)]‖ with S = S_{n+1}."""
    f = _pauli_family(f)
    oq = build_omega_q(*f.pauli_params)
    base = np.kron(block_density(f, n, budgets).matrix, f.rho.matrix)
    s = s_operator(oq, n + 1)
    expected = base + 0.5 * base @ s + 0.5 * s.conj().T @ base
    return operator_norm(block_density(f, n + 1, budgets).matrix - expected)


# ---------------------------------------------------------------------------
# A_n
# ---------------------------------------------------------------------------
class AnRow(BaseModel):
    n: int
    norm: float  # ‖A_n‖ from the recursion
    norm_definition: float  # ‖Π_n(I⊗ω)Π_n⁻¹‖
    relative_diff: float
    condition_number: float
    s_norm: float | None = None  # ‖S_n‖ exact
    s_bound: float | None = None  # ‖ω‖‖Q‖

    @computed_field
    @property
    def agrees(self) -> bool:
        return self.relative_diff <= RECURSION_RTOL


class AnRecursion(BaseModel):
    rows: list[AnRow]
    singular_at: int | None = None
    singular_eigenvalue: float | None = None

    @computed_field
    @property
    def norms(self) -> list[float]:
        return [r.norm for r in self.rows]

    @computed_field
    @property
    def max_relative_diff(self) -> float:
        return max((r.relative_diff for r in self.rows), default=0.0)


def _inverse_spectral(pi: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    spec = eig_hermitian(pi)
    lam = spec.eigenvalues
    if lam[-1] < SINGULAR_FLOOR:
        raise SingularBlock(n, float(lam[-1]))
    cond = float(lam[0] / lam[-1])
    if cond > ILL_CONDITIONED:
        log.warning("Π_%d is ill-conditioned (condition number %.3e)", n, cond)
    v = spec.eigenvectors
    return (v / lam) @ v.conj().T, cond


def a_n_recursion(
    params: SourceFamily | tuple[float, float, float],
    n_max: int,
    budgets: Budgets | None = None,
    stop_on_singular: bool = False,
) -> AnRecursion:
    """A_n by definition and by the K_n recursion for n = 1..n_max.

    A singular Π_n raises :class:`SingularBlock`, or ends the table with
    ``singular_at`` set when ``stop_on_singular`` is true.
    """
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    f = _pauli_family(params)
    oq = build_omega_q(*f.pauli_params)
    omega, q_dag = oq.omega, oq.q_matrix.conj().T

    rows: list[AnRow] = []
    a_prev: np.ndarray | None = None
    for n in range(1, n_max + 1):
        pi = block_density(f, n, budgets).matrix
        try:
            pi_inv, cond = _inverse_spectral(pi, n)
        except SingularBlock as exc:
            if not stop_on_singular:
                raise
            log.info("A_n recursion stops: %s", exc)
            return AnRecursion(rows=rows, singular_at=n, singular_eigenvalue=exc.eigenvalue)
        local = kron(identity(2 ** (n - 1)), omega)
        a_def = pi @ local @ pi_inv
        if a_prev is None:
            a_rec, s_norm, s_bound = omega.copy(), None, None
        else:
            s = s_operator(oq, n)
            k = identity(2**n) + 0.5 * kron(a_prev, q_dag) + 0.5 * s.conj().T
            # A_n K = K (I⊗ω)
            a_rec = scipy.linalg.solve(k.T, (k @ local).T).T
            s_norm, s_bound = operator_norm(s), oq.w * oq.q
        norm_def = operator_norm(a_def)
        rows.append(
            AnRow(
                n=n,
                norm=operator_norm(a_rec),
                norm_definition=norm_def,
                relative_diff=operator_norm(a_rec - a_def) / max(norm_def, SINGULAR_FLOOR),
                condition_number=cond,
                s_norm=s_norm,
                s_bound=s_bound,
            )
        )
        a_prev = a_rec
    return AnRecursion(rows=rows)
