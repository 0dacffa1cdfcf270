from __future__ import annotations

"""Sequential evaluation of cylinder probabilities.

The reduced state carried from one site to the next obeys

    T_1 = ρ,   T_next = ½ tr_lead[((A_x T + T A_x) ⊗ I) R]

and the probability of a prefix equals ``tr(T)`` after consuming it. States
are kept at unit trace with the log of the dropped weight alongside, so long
messages do not underflow.

The recursion needs tr₂R = I; `SourceFamily.transfer_r4` refuses families
that break it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from sources import SourceFamily

from .pom import Pom

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransferState:
    t: np.ndarray  # unit-trace d×d, zero if the prefix is impossible
    log_weight: float  # log of the prefix probability
    length: int = 0

    @property
    def probability(self) -> float:
        return math.exp(self.log_weight) if self.log_weight > -math.inf else 0.0

    @property
    def matrix(self) -> np.ndarray:
        """Unnormalized state, tr = prefix probability."""
        return self.probability * self.t


def initial_state(f: SourceFamily) -> TransferState:
    return TransferState(t=f.rho.matrix.copy(), log_weight=0.0, length=0)


def push(t: np.ndarray, a: np.ndarray, r4: np.ndarray) -> np.ndarray:
    """½ tr_lead[((A T + T A) ⊗ I) R], batched over leading axes of ``t``/``a``."""
    m = a @ t + t @ a
    return 0.5 * np.einsum("...ik,kpiq->...pq", m, r4)


def step(state: TransferState, a: np.ndarray, r4: np.ndarray) -> TransferState:
    if state.log_weight == -math.inf:
        return TransferState(state.t, -math.inf, state.length + 1)
    nxt = push(state.t, a, r4)
    weight = float(np.trace(nxt).real)
    if weight <= 0.0:
        return TransferState(np.zeros_like(nxt), -math.inf, state.length + 1)
    return TransferState(nxt / weight, state.log_weight + math.log(weight), state.length + 1)


def transfer_prefix(
    f: SourceFamily, p: Pom, word: Sequence[int] | str
) -> TransferState:
    """Consume ``word`` (symbols 1..r) and return the state after it."""
    symbols = parse_word(word, p.r)
    r4 = f.transfer_r4
    state = initial_state(f)
    for x in symbols:
        state = step(state, p.operators[x], r4)
    return state


def pattern_probability(
    f: SourceFamily, p: Pom, pattern: Iterable[int | None]
) -> float:
    """μ of a cylinder with wildcards: ``None`` sites are summed over (A = I)."""
    r4 = f.transfer_r4
    eye = np.eye(f.d, dtype=complex)
    state = initial_state(f)
    for x in pattern:
        a = eye if x is None else p.operators[_symbol_index(x, p.r)]
        state = step(state, a, r4)
    return state.probability


def prefix_probabilities(
    f: SourceFamily, p: Pom, n: int
) -> np.ndarray:
    """All r**n word probabilities by level-wise transfer, shape ``(r,)*n``."""
    r4 = f.transfer_r4
    states = f.rho.matrix[None].copy()
    for _ in range(n - 1):
        nxt = push(states[:, None], p.operators[None], r4)  # (m, r, d, d)
        states = nxt.reshape(-1, f.d, f.d)
    probs = np.einsum("kij,mji->mk", p.operators, states).real
    return probs.reshape((p.r,) * n)


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------
def parse_word(word: Sequence[int] | str, r: int) -> list[int]:
    """1-based symbols (or their spelling from :func:`format_word`) to 0-based
    indices. Digit strings are one symbol per character; dashed strings (and
    every string once r > 9) are one symbol per piece."""
    if isinstance(word, str):
        word = split_word(word, r)
    return [_symbol_index(x, r) for x in word]


def split_word(text: str, r: int | None = None) -> list[str]:
    """Symbol pieces of a spelled word; past nine letters there is no digit form."""
    text = text.replace(" ", "")
    if not text:
        return []
    if "-" in text or (r is not None and r > 9):
        return text.split("-")
    return list(text)


def _symbol_index(x: int, r: int) -> int:
    if not 1 <= int(x) <= r:
        raise ValueError(f"symbol {x} outside the alphabet 1..{r}")
    return int(x) - 1


def format_word(indices: Iterable[int], r: int) -> str:
    """0-based indices to the public 1-based spelling."""
    symbols = [str(int(i) + 1) for i in indices]
    return "".join(symbols) if r <= 9 else "-".join(symbols)
