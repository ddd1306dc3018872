"""Exception hierarchy shared by the exact kernel, the dynamics and the CLI."""


class LoziError(Exception):
    """Base class for every error raised by this package."""


class UsageError(LoziError, ValueError):
    """Invalid input: mismatched fields, degenerate segments, bad arguments."""


class DomainError(LoziError, ArithmeticError):
    """A mathematically undefined request (inverse of zero, sqrt of a negative, ...)."""


class ResourceError(LoziError, RuntimeError):
    """A vertex or depth budget was exhausted.

    ``achieved`` records how far the computation got before stopping.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InvariantViolation(LoziError, RuntimeError):
    """A property that must hold for the model failed; ``witness`` carries evidence."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(LoziError, RuntimeError):
    """A derived object could not be built at the requested depth."""
