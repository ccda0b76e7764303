"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    ``result`` carries the best estimate available when the procedure gave up.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class PerturbationBreakdownError(ValueError):
    """A first-order transition probability left the interval [0, 1]."""


class PerturbationWarning(UserWarning):
    """A transition probability is large enough that first-order theory is suspect."""
