"""Exception hierarchy.

Everything raised deliberately by the package derives from ``EntroconeError``
so callers can catch the library without catching bugs.
"""


class EntroconeError(Exception):
    """Base class for all package errors."""


class DomainError(EntroconeError, ValueError):
    """Inputs violate an operation's contract."""


class CoordinateMismatchError(DomainError):
    """A vector or system refers to coordinates the other side lacks."""


class IncompatibleModelError(DomainError):
    """A family of marginal tables disagrees on a shared sub-marginal."""


class NotSubmodularError(DomainError):
    """A partial function fails a submodularity triple it should satisfy."""

    def __init__(self, msg, triple=None):
        super().__init__(msg)
        self.triple = triple


class BudgetExceededError(EntroconeError):
    """A Fourier-Motzkin run produced more derived rows than allowed."""

    def __init__(self, budget: int, derived: int):
        super().__init__(
            f"elimination budget exhausted: {derived} derived rows > budget {budget}"
        )
        self.budget = budget
        self.derived = derived


class CapExceededError(EntroconeError):
    """A joint-outcome space is larger than the configured cap."""
