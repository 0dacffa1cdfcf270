from __future__ import annotations

"""Exact cylinder measures μ_n^A, block Shannon entropy and empirical entropy."""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Protocol, Sequence

import numpy as np

from sources import SourceFamily, block_density
from utils.budget import DEFAULT_BUDGETS, Budgets

from .pom import Pom
from .transfer import format_word, parse_word, prefix_probabilities

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-12
SUM_TOL = 1e-9


class ZeroProbabilityWord(ValueError):
    def __init__(self, word: str) -> None:
        self.word = word
        super().__init__(f"word {word} has probability zero; f_n is undefined")


@dataclass(frozen=True, eq=False)
class CylinderMeasure:
    """Probabilities of all length-``n`` records, stored as an ``(r,)*n`` array."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        worst = float(probs.min(initial=0.0))
        if worst < -CLAMP_TOL:
            log.warning("cylinder measure has negative mass %.3e; clamping", worst)
        probs = np.clip(probs, 0.0, None)
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            log.warning("cylinder measure sums to %.12g", total)
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.probs.ndim

    @property
    def r(self) -> int:
        return self.probs.shape[0]

    def prob(self, word: Sequence[int] | str) -> float:
        idx = parse_word(word, self.r)
        if len(idx) < self.n:
            raise ValueError(f"word of length {len(idx)} is shorter than n={self.n}")
        return float(self.probs[tuple(idx[: self.n])])

    def marginal(self) -> "CylinderMeasure":
        """Sum out the last symbol."""
        if self.n < 2:
            raise ValueError("cannot marginalize a length-1 measure")
        return CylinderMeasure(self.probs.sum(axis=-1))

    def items(self) -> Iterator[tuple[str, float]]:
        for idx in itertools.product(range(self.r), repeat=self.n):
            yield format_word(idx, self.r), float(self.probs[idx])

    def as_dict(self) -> dict[str, float]:
        return dict(self.items())


def cylinder_measure(
    f: SourceFamily, p: Pom, n: int, budgets: Budgets | None = None
) -> CylinderMeasure:
    """μ_n^A(k_1..k_n) = tr((A_{k_1}⊗…⊗A_{k_n}) Π_n) for every word."""
    if n < 1:
        raise ValueError(f"block length must be >= 1, got {n}")
    if p.d != f.d:
        raise ValueError(f"POM acts on C^{p.d}, source on C^{f.d}")
    budgets = budgets or DEFAULT_BUDGETS
    budgets.check_words(p.r, n)
    if budgets.dense_fits(f.d, n):
        probs = _dense_probs(block_density(f, n, budgets).matrix, p, n)
    else:
        log.debug("Π_%d exceeds max_dim; enumerating by transfer", n)
        probs = prefix_probabilities(f, p, n)
    return CylinderMeasure(probs)


def _dense_probs(pi: np.ndarray, p: Pom, n: int) -> np.ndarray:
    d = p.d
    tensor = pi.reshape((d,) * (2 * n))
    # tr(AΠ) = Σ A[j, i] Π[i, j]; contract one site per pass, outcome axes pile up
    for s in range(n):
        tensor = np.tensordot(tensor, p.operators, axes=([0, n - s], [2, 1]))
    return tensor.real


class SampledMessages(Protocol):
    """Anything carrying per-message log-probabilities, e.g. a MessageSet."""

    log_probs: np.ndarray

    @property
    def n(self) -> int: ...

    def word(self, index: int) -> str: ...


def shannon_block_entropy(m: CylinderMeasure) -> float:
    """−Σ_w μ(w) log μ(w), nats."""
    p = m.probs[m.probs > 0]
    return float(-np.sum(p * np.log(p)))


def empirical_entropy(
    source: CylinderMeasure | SampledMessages, word: Sequence[int] | str | int
) -> float:
    """f_n = −(1/n) log μ(first n symbols of ``word``).

    ``source`` is a :class:`CylinderMeasure` (``word`` a symbol sequence) or a
    sampled message set (``word`` the message index).
    """
    if isinstance(source, CylinderMeasure):
        prob = source.prob(word)
        if prob <= 0.0:
            spelled = format_word(parse_word(word, source.r)[: source.n], source.r)
            raise ZeroProbabilityWord(spelled)
        return -math.log(prob) / source.n
    log_prob = float(source.log_probs[word])
    if log_prob == -math.inf:
        raise ZeroProbabilityWord(source.word(word))
    return -log_prob / source.n
