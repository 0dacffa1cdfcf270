from __future__ import annotations

"""Block densities Π_n, built by one recursion step at a time and cached."""

import logging

import numpy as np

from linalg import PSD_FLOOR, apply_local, hermitian_residual, identity, symmetrize
from utils.budget import DEFAULT_BUDGETS, Budgets

from .density import DensityMatrix
from .family import SourceFamily, SourceKind

log = logging.getLogger(__name__)


class PositivityViolation(ValueError):
    """Π_n has an eigenvalue below the PSD floor."""

    def __init__(self, n: int, eigenvalue: float) -> None:
        self.n = n
        self.eigenvalue = eigenvalue
        super().__init__(
            f"Π_{n} is not positive: min eigenvalue {eigenvalue:.6e} < {PSD_FLOOR:g}"
        )


def recursion_step(f: SourceFamily, pi: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Return (Π_{n+1}, asymmetry before symmetrization) from Π_n.

    Π_{n+1} = ½(Π_n⊗I)(I_{n−1}⊗R) + ½(I_{n−1}⊗R)(Π_n⊗I); Bernoulli sources
    take the shortcut Π_n⊗ρ.
    """
    if f.kind is SourceKind.bernoulli:
        return np.kron(pi, f.rho.matrix), 0.0
    d = f.d
    x = np.kron(pi, identity(d))
    out = apply_local(f.transfer_r, x, offset=n - 1, n=n + 1, d=d, side="right")
    out += apply_local(f.transfer_r, x, offset=n - 1, n=n + 1, d=d, side="left")
    del x
    out *= 0.5
    asymmetry = hermitian_residual(out)
    return symmetrize(out), asymmetry


def block_density(
    f: SourceFamily,
    n: int,
    budgets: Budgets | None = None,
    check_positivity: bool | None = None,
) -> DensityMatrix:
    """Return Π_n for ``f``.

    Positivity is enforced for explicit-R families unless ``check_positivity``
    says otherwise; other kinds are positive by construction or are probed by
    :func:`sources.checks.verify_positivity`.
    """
    if n < 1:
        raise ValueError(f"block length must be >= 1, got {n}")
    (budgets or DEFAULT_BUDGETS).check_dim(f.d, n)
    if check_positivity is None:
        check_positivity = f.kind is SourceKind.explicit_r

    block = f.blocks.get(n)
    if block is None:
        block = _build(f, n, check_positivity)
    if check_positivity and block.min_eigenvalue < PSD_FLOOR:
        raise PositivityViolation(n, block.min_eigenvalue)
    return block


def _build(f: SourceFamily, n: int, check_positivity: bool) -> DensityMatrix:
    with f.blocks.write_lock:
        start = f.blocks.nearest_below(n)
        if start is None:
            f.blocks.put(1, f.rho)
            m, block = 1, f.rho
        else:
            m, block = start
        pi = block.matrix
        while m < n:
            if check_positivity and block.min_eigenvalue < PSD_FLOOR:
                raise PositivityViolation(m, block.min_eigenvalue)
            pi, asymmetry = recursion_step(f, pi, m)
            m += 1
            block = DensityMatrix(pi, validate=False)
            f.blocks.put(m, block, asymmetry)
            log.debug("built Π_%d for %s (asymmetry %.2e)", m, f.describe(), asymmetry)
        return block
