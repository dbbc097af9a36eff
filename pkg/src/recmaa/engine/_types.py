"""Shared engine-facing types: budgets, results, statuses."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..terms import Term

DEFAULT_MAX_REWRITES = 10**9
DEFAULT_MAX_DEPTH = 10**6

# Memoization cache entry cap; the whole cache resets when it fills up.
DEFAULT_MEMO_LIMIT = 2**22


@dataclass(frozen=True)
class Budget:
    """Work limits for one normalization run."""

    max_rewrites: int = DEFAULT_MAX_REWRITES
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self) -> None:
        if self.max_rewrites <= 0 or self.max_depth <= 0:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True)
class NormalizeResult:
    """Outcome of a normalization run.

    ``stuck`` is set when the normal form still contains defined symbols,
    i.e. some subterm could not be reduced.  ``peak_term_size`` is the
    largest term (in tree nodes) materialized during the run.
    """

    normal_form: "Term"
    rule_applications: int
    condition_evaluations: int
    peak_term_size: int
    stuck: bool


class BudgetExceeded(Exception):
    """A run hit its rewrite or depth limit; carries partial statistics."""

    def __init__(
        self,
        kind: str,
        rule_applications: int,
        condition_evaluations: int,
        peak_term_size: int,
    ):
        self.kind = kind  # "rewrites" or "depth"
        self.rule_applications = rule_applications
        self.condition_evaluations = condition_evaluations
        self.peak_term_size = peak_term_size
        super().__init__(
            f"normalization exceeded its {kind} budget "
            f"after {rule_applications} rule applications"
        )


class Status(Enum):
    """Outcome classes for boolean vector evaluation."""

    PASS = "pass"
    FAIL = "fail"
    STUCK = "stuck"
    BUDGET_EXCEEDED = "budget-exceeded"

    def __str__(self) -> str:
        return self.value
