from __future__ import annotations

"""Local observables shifted into a finite window, and the state functional."""

from dataclasses import dataclass

import numpy as np

from linalg import DimensionMismatch, as_matrix, embed, marginal, site_count

from .density import DensityMatrix


@dataclass(frozen=True, eq=False)
class ShiftedObservable:
    """A ``k``-site operator placed at ``offset`` inside an ``n``-site window."""

    base: np.ndarray
    offset: int
    window: int
    local_dim: int = 2

    def __post_init__(self) -> None:
        base = as_matrix(self.base)
        object.__setattr__(self, "base", base)
        if self.offset < 0:
            raise DimensionMismatch(f"offset must be >= 0, got {self.offset}")
        if self.offset + self.k > self.window:
            raise DimensionMismatch(
                f"support [{self.offset}, {self.offset + self.k}) leaves the "
                f"{self.window}-site window"
            )

    @property
    def k(self) -> int:
        return site_count(self.base.shape[0], self.local_dim)

    @property
    def support(self) -> range:
        return range(self.offset, self.offset + self.k)

    def shifted(self, steps: int) -> "ShiftedObservable":
        """α^steps: push the observable ``steps`` sites to the right."""
        return ShiftedObservable(self.base, self.offset + steps, self.window, self.local_dim)

    def dense(self) -> np.ndarray:
        return embed(self.base, self.offset, self.window, self.local_dim)


def expectation(pi_n: DensityMatrix, obs: ShiftedObservable) -> complex:
    """τ_n(A) = tr(A Π_n), evaluated on the reduced block of A's support."""
    if pi_n.dim != obs.local_dim**obs.window:
        raise DimensionMismatch(
            f"observable window {obs.window} does not match a block of dim {pi_n.dim}"
        )
    reduced = marginal(pi_n.matrix, obs.window, obs.local_dim, obs.offset, obs.k)
    return complex(np.trace(obs.base @ reduced))
