"""Exception types raised across the package.

Every refusal names the precondition it enforces, so the CLI can report it
and map it to an exit status.
"""


class FabryError(Exception):
    """Base class; ``precondition`` names the violated requirement."""

    def __init__(self, message, precondition=None):
        super().__init__(message)
        self.precondition = precondition or self.default_precondition

    default_precondition = "unspecified"


class ValidationError(FabryError, ValueError):
    """An argument falls outside an operation's domain."""

    default_precondition = "argument-domain"


class InsufficientDataError(ValidationError):
    default_precondition = "insufficient data"


class HypothesisError(FabryError):
    """The series does not satisfy the hypothesis of the inequality asked for."""

    default_precondition = "N-good"


class TruncationError(FabryError):
    """The stored coefficient range is too short for the requested damping."""

    default_precondition = "energy-tolerance"

    def __init__(self, message, min_tau=None):
        super().__init__(message)
        self.min_tau = min_tau


class CertificationError(FabryError):
    default_precondition = "certified-negativity"
