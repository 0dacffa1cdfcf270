from __future__ import annotations

"""Block caches for source families."""

import threading
from typing import Dict, Protocol, Tuple

from .density import DensityMatrix


class AbstractBlockStore(Protocol):
    """Cache of built blocks Π_n keyed by ``n``."""

    def get(self, n: int) -> DensityMatrix | None:
        """Return Π_n if it was built already."""

    def nearest_below(self, n: int) -> Tuple[int, DensityMatrix] | None:
        """Return the largest cached ``(m, Π_m)`` with ``m <= n``."""

    def put(self, n: int, block: DensityMatrix, asymmetry: float = 0.0) -> None:
        """Store Π_n together with its pre-symmetrization residual."""


class BlockStore:
    """In-memory block cache with single-writer discipline.

    Readers of cached blocks never block; builders hold :attr:`write_lock`
    so a family's blocks are produced once and in order.
    """

    def __init__(self) -> None:
        self._blocks: Dict[int, DensityMatrix] = {}
        self._asymmetry: Dict[int, float] = {}
        self.write_lock = threading.Lock()

    def get(self, n: int) -> DensityMatrix | None:
        return self._blocks.get(n)

    def nearest_below(self, n: int) -> Tuple[int, DensityMatrix] | None:
        built = [m for m in self._blocks if m <= n]
        if not built:
            return None
        m = max(built)
        return m, self._blocks[m]

    def put(self, n: int, block: DensityMatrix, asymmetry: float = 0.0) -> None:
        self._asymmetry[n] = asymmetry
        self._blocks[n] = block

    def asymmetry(self, n: int) -> float:
        """Max |Π − Π†| seen before symmetrizing block ``n``."""
        return self._asymmetry.get(n, 0.0)

    def evict_above(self, n: int) -> None:
        """Drop cached blocks larger than ``n`` (frees the big ones)."""
        with self.write_lock:
            for m in [m for m in self._blocks if m > n]:
                self._blocks.pop(m, None)
                self._asymmetry.pop(m, None)

    def __len__(self) -> int:
        return len(self._blocks)
