"""Caps on exhaustive searches.

Defaults can be overridden with the ``WEFCHORES_MAX_STATES`` and
``WEFCHORES_MAX_SUBSETS`` environment variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import BudgetExceeded

DEFAULT_MAX_STATES = 2 * 10**7
DEFAULT_MAX_SUBSETS = 2**14


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive")
    return value


@dataclass(frozen=True)
class EnumerationBudget:
    max_states: int = DEFAULT_MAX_STATES
    max_subsets: int = DEFAULT_MAX_SUBSETS

    def __post_init__(self):
        if self.max_states <= 0 or self.max_subsets <= 0:
            raise ValueError("budget caps must be positive")

    @classmethod
    def from_env(cls) -> "EnumerationBudget":
        return cls(
            max_states=_env_int("WEFCHORES_MAX_STATES", DEFAULT_MAX_STATES),
            max_subsets=_env_int("WEFCHORES_MAX_SUBSETS", DEFAULT_MAX_SUBSETS),
        )

    def check_states(self, n: int, m: int) -> None:
        needed = n**m
        if needed > self.max_states:
            raise BudgetExceeded(needed, self.max_states, "allocations")

    def check_subsets(self, m: int) -> None:
        needed = 2**m
        if needed > self.max_subsets:
            raise BudgetExceeded(needed, self.max_subsets, "subsets")


def resolve(budget) -> EnumerationBudget:
    if budget is None:
        return EnumerationBudget.from_env()
    if isinstance(budget, EnumerationBudget):
        return budget
    raise TypeError(f"expected EnumerationBudget, got {type(budget).__name__}")
