from __future__ import annotations

"""Monte-Carlo messages drawn by sequential conditional sampling.

Messages are produced in chunks; chunk ``i`` draws from its own generator
seeded with ``seed ^ i``, so the message set depends only on ``seed`` and the
chunk size, never on how many worker threads ran the chunks.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sources import SourceFamily

from .pom import Pom
from .transfer import format_word, push

log = logging.getLogger(__name__)

CHUNK_SIZE = 256


def symbol_dtype(r: int) -> np.dtype:
    """Smallest unsigned dtype holding 0-based symbols of an ``r``-letter alphabet."""
    return np.min_scalar_type(max(r - 1, 0))


@dataclass(frozen=True, eq=False)
class MessageSet:
    symbols: np.ndarray  # (count, n), 0-based
    log_probs: np.ndarray  # (count,), log μ(message)
    r: int
    seed: int

    @property
    def n(self) -> int:
        return self.symbols.shape[1]

    @property
    def count(self) -> int:
        return self.symbols.shape[0]

    def word(self, index: int) -> str:
        return format_word(self.symbols[index], self.r)

    def empirical_entropies(self) -> np.ndarray:
        """f_n for every message."""
        return -self.log_probs / self.n

    def frequencies(self, length: int) -> np.ndarray:
        """Empirical distribution of the first ``length`` symbols, ``(r,)*length``."""
        if not 1 <= length <= self.n:
            raise ValueError(f"length must be in 1..{self.n}, got {length}")
        flat = np.ravel_multi_index(tuple(self.symbols[:, :length].T), (self.r,) * length)
        counts = np.bincount(flat, minlength=self.r**length)
        return (counts / self.count).reshape((self.r,) * length)

    def to_text(self) -> str:
        """One message per line, spelled as by :func:`format_word`."""
        return "".join(self.word(i) + "\n" for i in range(self.count))

    def write_text(self, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.write_text(self.to_text(), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write messages to {path}: {exc}") from exc
        return path


def sample_messages(
    f: SourceFamily,
    p: Pom,
    n: int,
    count_msgs: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> MessageSet:
    if n < 1 or count_msgs < 1:
        raise ValueError("need n >= 1 and count_msgs >= 1")
    sizes = [
        min(chunk_size, count_msgs - start) for start in range(0, count_msgs, chunk_size)
    ]

    def run(i: int) -> tuple[np.ndarray, np.ndarray]:
        return _sample_chunk(f, p, n, sizes[i], np.random.default_rng(seed ^ i))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    log.debug("sampled %d messages of length %d in %d chunks", count_msgs, n, len(sizes))
    return MessageSet(
        symbols=np.concatenate([s for s, _ in parts]),
        log_probs=np.concatenate([lp for _, lp in parts]),
        r=p.r,
        seed=seed,
    )


def _sample_chunk(
    f: SourceFamily, p: Pom, n: int, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    d, r = f.d, p.r
    r4 = f.transfer_r4
    states = np.broadcast_to(f.rho.matrix, (size, d, d)).copy()
    log_probs = np.zeros(size)
    out = np.empty((size, n), dtype=symbol_dtype(r))
    rows = np.arange(size)
    for s in range(n):
        probs = np.clip(np.einsum("kij,mji->mk", p.operators, states).real, 0.0, None)
        cdf = np.cumsum(probs, axis=1)
        u = rng.random(size) * cdf[:, -1]
        x = np.minimum((u[:, None] >= cdf).sum(axis=1), r - 1)
        chosen = probs[rows, x]
        with np.errstate(divide="ignore"):
            log_probs += np.log(chosen)
        out[:, s] = x
        if s + 1 < n:
            nxt = push(states, p.operators[x], r4)
            weight = np.einsum("mii->m", nxt).real
            states = nxt / np.where(weight > 0, weight, 1.0)[:, None, None]
    if np.any(log_probs == -math.inf):
        log.warning("sampled a zero-probability message; check the source positivity")
    return out, log_probs
