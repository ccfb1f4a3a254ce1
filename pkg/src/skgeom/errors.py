"""Exception hierarchy shared by all skgeom modules."""

import numpy as np


class SkgeomError(Exception):
    """Base class for every error raised by skgeom."""


class EvaluationError(SkgeomError, ArithmeticError):
    """A function could not be evaluated (log of a non-positive value, 1/0, non-finite result)."""


class OrderExceededError(SkgeomError, ValueError):
    """A derivative of higher order than the jet carries was requested."""


class DomainError(SkgeomError, ValueError):
    """A point lies outside the domain on which an object is defined."""


class SingularLocusError(DomainError):
    """A point lies on a locus where a metric or potential is singular."""


class DegeneracyError(SkgeomError, ValueError):
    """A form or prepotential is degenerate where non-degeneracy is required."""


class InversionError(SkgeomError, np.linalg.LinAlgError):
    """Matrix inversion refused because the matrix is (numerically) singular."""

    def __init__(self, message, condition_number=float("inf")):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number


class GroupError(SkgeomError, ValueError):
    """Invalid group element or incompatible group operation."""


class ConventionMismatch(SkgeomError):
    """Two independent computations of the same object disagree beyond tolerance."""

    def __init__(self, message, first, second):
        super().__init__(message)
        self.first = first
        self.second = second


class ConfigError(SkgeomError, ValueError):
    """Invalid experiment configuration."""
