"""Exception hierarchy shared across the package."""


class GwhtError(Exception):
    """Base class for all package errors."""


class ArgumentError(GwhtError, ValueError):
    """An argument violates an operation's contract (shape, axes, range)."""


class BudgetExceededError(GwhtError, RuntimeError):
    """An enumeration would exceed the configured resource budget.

    Carries the offending cardinality so callers can report it.
    """

    def __init__(self, message: str, count: int, budget: int):
        super().__init__(f"{message}: {count} exceeds budget {budget}")
        self.count = count
        self.budget = budget


class EncoderAbort(GwhtError):
    """The stochastic encoder found no output sequence consistent with the
    requested shared-randomness indices."""
