from __future__ import annotations

"""Time averages of cylinder indicators under the induced classical measure.

∫⟨χ_C⟩_N χ_D dμ = (1/N) Σ_k μ({x : S^k x ∈ C, x ∈ D}); the shifted cylinder
and D are merged into one wildcard pattern and evaluated by the transfer
recursion, or estimated from sampled messages.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel

from measurement import Pom, pattern_probability, sample_messages, split_word
from sources import SourceFamily

log = logging.getLogger(__name__)

# Exact enumeration walks one transfer chain per shift; past this many sites
# the Monte-Carlo path is used instead.
EXACT_MAX_SITES = 4096


@dataclass(frozen=True)
class Cylinder:
    """Fixed symbols (1..r, ``None`` = any) starting at site ``offset`` (0-based)."""

    offset: int
    symbols: tuple[int | None, ...]

    @classmethod
    def parse(cls, spec: str | Sequence[int | None], offset: int = 0) -> "Cylinder":
        """``"1*2"``, ``"10-*-2"`` or ``[1, None, 2]``; ``*`` is a wildcard."""
        if isinstance(spec, str):
            symbols = tuple(None if s == "*" else int(s) for s in split_word(spec))
        else:
            symbols = tuple(None if s is None else int(s) for s in spec)
        if offset < 0:
            raise ValueError("cylinder offset must be >= 0")
        return cls(offset=offset, symbols=symbols)

    @property
    def end(self) -> int:
        return self.offset + len(self.symbols)

    def shifted(self, k: int) -> "Cylinder":
        return Cylinder(self.offset + k, self.symbols)

    def is_full(self) -> bool:
        return all(s is None for s in self.symbols)

    def matches(self, symbols: np.ndarray) -> np.ndarray:
        """Row mask over 0-based messages ``(count, length)``."""
        mask = np.ones(symbols.shape[0], dtype=bool)
        for j, s in enumerate(self.symbols):
            if s is not None:
                mask &= symbols[:, self.offset + j] == s - 1
        return mask


def merge(*cylinders: Cylinder) -> list[int | None] | None:
    """One pattern fixing every site any cylinder fixes; ``None`` if they conflict."""
    length = max(c.end for c in cylinders)
    pattern: list[int | None] = [None] * length
    for c in cylinders:
        for j, s in enumerate(c.symbols):
            if s is None:
                continue
            site = c.offset + j
            if pattern[site] is not None and pattern[site] != s:
                return None
            pattern[site] = s
    return pattern


def _mu(f: SourceFamily, p: Pom, *cylinders: Cylinder) -> float:
    pattern = merge(*cylinders)
    if pattern is None:
        return 0.0
    return pattern_probability(f, p, pattern)


class ClassicalTimeAverage(BaseModel):
    family: str
    pom: str
    shifts: int
    method: str  # "exact" | "monte-carlo"
    estimate: float
    product: float  # μ(C)μ(D)
    deviation: float
    std_error: float  # 0 for the exact path
    samples: int = 0


def classical_time_average_check(
    f: SourceFamily,
    p: Pom,
    cyl_c: Cylinder,
    cyl_d: Cylinder,
    N: int,
    samples: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> ClassicalTimeAverage:
    """|∫⟨χ_C⟩_N χ_D dμ − μ(C)μ(D)|, exactly when ``samples`` is 0, else by
    Monte-Carlo over ``samples`` messages with a standard-error bar."""
    if N < 1:
        raise ValueError("need N >= 1")
    product = _mu(f, p, cyl_c) * _mu(f, p, cyl_d)
    length = max(cyl_c.end + N - 1, cyl_d.end)

    if samples <= 0:
        if length > EXACT_MAX_SITES:
            raise ValueError(
                f"exact time average needs {length} sites; pass samples for Monte-Carlo"
            )
        terms = [_mu(f, p, cyl_c.shifted(k), cyl_d) for k in range(N)]
        estimate = math.fsum(terms) / N
        std_error = 0.0
        method = "exact"
    else:
        msgs = sample_messages(f, p, length, samples, seed, workers=workers)
        in_d = cyl_d.matches(msgs.symbols)
        hits = np.zeros(samples)
        for k in range(N):
            hits += cyl_c.shifted(k).matches(msgs.symbols)
        per_message = hits / N * in_d
        estimate = float(per_message.mean())
        std_error = float(per_message.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
        method = "monte-carlo"

    log.debug("time average N=%d (%s): %.6g vs product %.6g", N, method, estimate, product)
    return ClassicalTimeAverage(
        family=f.describe(),
        pom=p.describe(),
        shifts=N,
        method=method,
        estimate=estimate,
        product=product,
        deviation=abs(estimate - product),
        std_error=std_error,
        samples=max(samples, 0),
    )
