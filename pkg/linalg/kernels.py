from __future__ import annotations

"""Dense complex matrix kernel shared by every other package.

Site ordering: in an ``n``-site operator the factor for site 1 is the leftmost
(slowest) Kronecker index, so "leading" partial traces remove early sites and
"trailing" ones remove late sites.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

log = logging.getLogger(__name__)

TOL_HERM = 1e-12  # absolute, per entry
PSD_FLOOR = -1e-10
ZERO_EIGENVALUE = 1e-14
# Above this dimension norms of Hermitian matrices go through ARPACK.
_DENSE_NORM_LIMIT = 512

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_0, SIGMA_1, SIGMA_2, SIGMA_3)

Side = Literal["leading", "trailing"]


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""

    def __init__(self, residual: float, tol: float = TOL_HERM) -> None:
        self.residual = residual
        super().__init__(
            f"matrix is not Hermitian: max |M - M†| = {residual:.3e} > {tol:.1e}"
        )


class DimensionMismatch(ValueError):
    """Raised when operand shapes do not fit together."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def projectors(self, tol: float = 1e-10) -> list[tuple[float, np.ndarray]]:
        """Spectral projectors, grouping eigenvalues closer than ``tol``."""
        groups: list[tuple[float, list[int]]] = []
        for idx, lam in enumerate(self.eigenvalues):
            if groups and abs(groups[-1][0] - lam) <= tol:
                groups[-1][1].append(idx)
            else:
                groups.append((float(lam), [idx]))
        out = []
        for lam, cols in groups:
            v = self.eigenvectors[:, cols]
            out.append((lam, v @ v.conj().T))
        return out


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------
def as_matrix(m: Sequence | np.ndarray) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got {arr.shape}")
    return arr


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def level_pauli(name: str, d: int) -> np.ndarray:
    """``"i"`` is the d-level identity; ``"x"``, ``"y"``, ``"z"`` act on the first two levels."""
    if name == "i":
        return identity(d)
    index = {"x": 1, "y": 2, "z": 3}.get(name)
    if index is None or d < 2:
        raise ValueError(f"no Pauli {name!r} on {d} levels")
    out = np.zeros((d, d), dtype=complex)
    out[:2, :2] = PAULI[index]
    return out


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, site 1 leftmost."""
    if not factors:
        raise DimensionMismatch("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(f) for f in factors))


def kron_power(m: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("tensor power must be non-negative")
    m = as_matrix(m)
    if n == 0:
        return identity(1)
    return reduce(np.kron, [m] * n)


def embed(local: np.ndarray, offset: int, n: int, d: int) -> np.ndarray:
    """Place a ``k``-site operator on sites ``offset..offset+k-1`` of ``n`` sites."""
    local = as_matrix(local)
    k = site_count(local.shape[0], d)
    if offset < 0 or offset + k > n:
        raise DimensionMismatch(
            f"support [{offset}, {offset + k}) does not fit in {n} sites"
        )
    return kron(identity(d**offset), local, identity(d ** (n - offset - k)))


def site_count(dim: int, d: int) -> int:
    """Return ``k`` with ``d**k == dim``."""
    k = int(round(np.log(dim) / np.log(d))) if dim > 1 else 0
    if d**k != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of {d}")
    return k


# ---------------------------------------------------------------------------
# partial traces and local products
# ---------------------------------------------------------------------------
def partial_trace(m: np.ndarray, dims: tuple[int, int], side: Side) -> np.ndarray:
    """Trace out the leading (``dims[0]``) or trailing (``dims[1]``) factor."""
    m = as_matrix(m)
    d0, d1 = dims
    if m.shape != (d0 * d1, d0 * d1):
        raise DimensionMismatch(
            f"matrix of shape {m.shape} does not split as {d0} x {d1}"
        )
    t = m.reshape(d0, d1, d0, d1)
    if side == "trailing":
        return np.einsum("ijkj->ik", t)
    if side == "leading":
        return np.einsum("ijik->jk", t)
    raise ValueError(f"side must be 'leading' or 'trailing', got {side!r}")


def marginal(m: np.ndarray, n: int, d: int, start: int, length: int) -> np.ndarray:
    """Reduce an ``n``-site operator to sites ``start..start+length-1``."""
    m = as_matrix(m)
    if start < 0 or length < 0 or start + length > n:
        raise DimensionMismatch(
            f"window [{start}, {start + length}) does not fit in {n} sites"
        )
    if m.shape != (d**n, d**n):
        raise DimensionMismatch(f"expected a {d**n}-dim operator, got {m.shape}")
    left, mid, right = d**start, d**length, d ** (n - start - length)
    t = m.reshape(left, mid, right, left, mid, right)
    return np.einsum("iajibj->ab", t)


def apply_local(
    local: np.ndarray,
    x: np.ndarray,
    offset: int,
    n: int,
    d: int,
    side: Literal["left", "right"] = "left",
) -> np.ndarray:
    """Multiply ``x`` by ``I ⊗ local ⊗ I`` without building the embedding.

    ``side="left"`` returns ``(I⊗L⊗I) @ x``; ``side="right"`` returns
    ``x @ (I⊗L⊗I)``.
    """
    local = as_matrix(local)
    k = site_count(local.shape[0], d)
    dim = d**n
    if offset < 0 or offset + k > n:
        raise DimensionMismatch(
            f"support [{offset}, {offset + k}) does not fit in {n} sites"
        )
    if x.shape[0] != dim or x.shape[1] != dim:
        raise DimensionMismatch(f"expected a {dim}-dim operator, got {x.shape}")
    a, mid, b = d**offset, d**k, d ** (n - offset - k)
    if side == "left":
        t = x.reshape(a, mid, b, dim)
        return np.einsum("cm,imbx->icbx", local, t).reshape(dim, dim)
    t = x.reshape(dim, a, mid, b)
    return np.einsum("ximb,mc->xicb", t, local).reshape(dim, dim)


# ---------------------------------------------------------------------------
# spectra and norms
# ---------------------------------------------------------------------------
def hermitian_residual(m: np.ndarray) -> float:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    return hermitian_residual(m) <= tol


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m: np.ndarray) -> SpectralDecomposition:
    m = as_matrix(m)
    residual = hermitian_residual(m)
    if residual > TOL_HERM:
        raise NotHermitianError(residual)
    vals, vecs = scipy.linalg.eigh(symmetrize(m))
    return SpectralDecomposition(eigenvalues=vals[::-1], eigenvectors=vecs[:, ::-1])


def eigvalsh_desc(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, largest first."""
    m = as_matrix(m)
    residual = hermitian_residual(m)
    if residual > TOL_HERM:
        raise NotHermitianError(residual)
    return scipy.linalg.eigvalsh(symmetrize(m))[::-1]


def min_eigenvalue(m: np.ndarray) -> float:
    return float(eigvalsh_desc(m)[-1])


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = as_matrix(m)
    if m.shape[0] == m.shape[1] and is_hermitian(m):
        return hermitian_norm(m)
    return float(scipy.linalg.svdvals(m)[0])


def hermitian_norm(m: np.ndarray) -> float:
    """max |eigenvalue| of a Hermitian matrix."""
    dim = m.shape[0]
    if dim <= _DENSE_NORM_LIMIT:
        return float(np.max(np.abs(scipy.linalg.eigvalsh(symmetrize(m)))))
    try:
        vals = eigsh(symmetrize(m), k=1, which="LM", return_eigenvectors=False)
        return float(np.abs(vals[0]))
    except ArpackNoConvergence:
        log.warning("ARPACK did not converge for dim %d; using dense eigvalsh", dim)
        return float(np.max(np.abs(scipy.linalg.eigvalsh(symmetrize(m)))))


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = as_matrix(m)
    if m.shape[0] == m.shape[1] and is_hermitian(m):
        return float(np.sum(np.abs(scipy.linalg.eigvalsh(symmetrize(m)))))
    return float(np.sum(scipy.linalg.svdvals(m)))


def apply_spectral(m: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Return ``U fn(Λ) U†`` for Hermitian ``m``."""
    dec = eig_hermitian(m)
    u = dec.eigenvectors
    return (u * fn(dec.eigenvalues)) @ u.conj().T


def xlogx(values: np.ndarray, floor: float = ZERO_EIGENVALUE) -> np.ndarray:
    """Elementwise ``x log x`` with ``0 log 0 = 0`` below ``floor``."""
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    mask = values > floor
    out[mask] = values[mask] * np.log(values[mask])
    return out


def safe_log(values: np.ndarray, floor: float = ZERO_EIGENVALUE) -> np.ndarray:
    """Elementwise log, mapping entries at or below ``floor`` to 0 (kernel)."""
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    mask = values > floor
    out[mask] = np.log(values[mask])
    return out


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return operator_norm(a @ b - b @ a)
