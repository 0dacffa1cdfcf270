from __future__ import annotations

"""Size budgets for dense blocks and exhaustive word enumeration."""

import logging

from pydantic import BaseModel, ConfigDict, Field

log = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 4096
DEFAULT_MAX_WORDS = 2**20


class BudgetExceeded(RuntimeError):
    """A requested object would exceed a configured size budget."""

    def __init__(self, budget: str, required: int, limit: int, hint: str = "") -> None:
        self.budget = budget
        self.required = required
        self.limit = limit
        msg = f"{budget} budget exceeded: need {required}, limit is {limit}"
        if hint:
            msg = f"{msg}; {hint}"
        super().__init__(msg)


class Budgets(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_dim: int = Field(DEFAULT_MAX_DIM, ge=1, description="limit on d**n")
    max_words: int = Field(DEFAULT_MAX_WORDS, ge=1, description="limit on r**n")

    def check_dim(self, d: int, n: int) -> None:
        required = d**n
        if required > self.max_dim:
            raise BudgetExceeded(
                "max_dim", required, self.max_dim, "raise --max-dim or lower n"
            )

    def check_words(self, r: int, n: int) -> None:
        required = r**n
        if required > self.max_words:
            raise BudgetExceeded(
                "max_words",
                required,
                self.max_words,
                "use transfer_prefix or sample_messages for single words",
            )

    def dense_fits(self, d: int, n: int) -> bool:
        return d**n <= self.max_dim


DEFAULT_BUDGETS = Budgets()
