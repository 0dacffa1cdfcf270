from __future__ import annotations

"""Typical and atypical words of a cylinder measure."""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from measurement import CylinderMeasure, MessageSet, format_word

log = logging.getLogger(__name__)


class AepParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    delta: float = Field(gt=0)
    epsilon: float = Field(0.1, gt=0, lt=1)
    h_ref: float = Field(ge=0, description="reference entropy rate, nats")


@dataclass(frozen=True, eq=False)
class TypicalSplit:
    """L_{n,δ} (``typical`` mask) and its complement U_{n,δ}."""

    typical: np.ndarray  # bool, (r,)*n
    f_n: np.ndarray  # empirical entropy per word, inf for impossible words
    atypical_mass: float
    typical_mass: float

    @property
    def n(self) -> int:
        return self.typical.ndim

    @property
    def r(self) -> int:
        return self.typical.shape[0]

    @property
    def typical_count(self) -> int:
        return int(self.typical.sum())

    def words(self, typical: bool = True) -> Iterator[str]:
        for idx in itertools.product(range(self.r), repeat=self.n):
            if bool(self.typical[idx]) is typical:
                yield format_word(idx, self.r)


def typical_split(m: CylinderMeasure, params: AepParams) -> TypicalSplit:
    """Partition words by |f_n(x) − h_ref| ≤ δ."""
    if m.n != params.n:
        raise ValueError(f"measure has n={m.n}, params have n={params.n}")
    with np.errstate(divide="ignore"):
        f_n = -np.log(m.probs) / m.n
    typical = np.abs(f_n - params.h_ref) <= params.delta
    typical_mass = float(m.probs[typical].sum())
    atypical_mass = float(m.probs[~typical].sum())
    log.debug(
        "n=%d δ=%g: |L|=%d, μ(U)=%.6g", m.n, params.delta, int(typical.sum()), atypical_mass
    )
    return TypicalSplit(
        typical=typical, f_n=f_n, atypical_mass=atypical_mass, typical_mass=typical_mass
    )


class SampledTypicality(BaseModel):
    n: int
    samples: int
    delta: float
    h_ref: float
    atypical_fraction: float
    standard_error: float


def sampled_atypical_fraction(
    messages: MessageSet, h_ref: float, delta: float
) -> SampledTypicality:
    """Fraction of sampled messages with |f_n − h_ref| > δ."""
    f_n = messages.empirical_entropies()
    frac = float(np.mean(np.abs(f_n - h_ref) > delta))
    return SampledTypicality(
        n=messages.n,
        samples=messages.count,
        delta=delta,
        h_ref=h_ref,
        atypical_fraction=frac,
        standard_error=math.sqrt(max(frac * (1 - frac), 0.0) / messages.count),
    )

