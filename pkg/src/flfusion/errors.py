"""Exception hierarchy shared by all engines."""

from __future__ import annotations


class FusionError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FusionError, ValueError):
    """Input outside the domain of an operation."""


class UnsupportedError(FusionError, NotImplementedError):
    """Valid input that the current engines do not cover."""


class TruncationError(FusionError):
    """A delta-degree exceeded the configured truncation bound."""

    def __init__(self, degree, bound):
        super().__init__(f"delta-degree {degree} exceeds truncation bound {bound}")
        self.degree = degree
        self.bound = bound


class CyclicityError(FusionError):
    """A candidate cyclic vector does not generate the ambient module."""

    def __init__(self, achieved, ambient, message=""):
        text = message or f"cyclic span has dimension {achieved}, ambient has {ambient}"
        super().__init__(text)
        self.achieved = achieved
        self.ambient = ambient


class NonClosureError(FusionError):
    """A generator schedule ran out before the span stabilized."""

    def __init__(self, dimension, schedule):
        super().__init__(f"span not stable after degrees up to {schedule} (dimension {dimension})")
        self.dimension = dimension
        self.schedule = schedule


class InconsistencyError(FusionError):
    """Two computations that must agree did not."""
