"""Exception hierarchy shared by every module of the package."""


class ChoquetError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(ChoquetError, ValueError):
    """Input has the wrong shape or is missing required fields."""


class ValidationError(ChoquetError, ValueError):
    """A capacity (or similar object) fails its defining constraints."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DomainError(ChoquetError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(ChoquetError):
    """A linear program that was required to be feasible is not."""


class ResourceError(ChoquetError, RuntimeError):
    """An iteration or size cap was hit before an answer was reached."""


class InternalConsistencyError(ChoquetError, AssertionError):
    """Two independent computations of the same quantity disagree."""
