"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class ErgmPhaseError(Exception):
    exit_code = 1


class ParameterError(ErgmPhaseError, ValueError):
    """Invalid model parameters or run configuration."""

    exit_code = 2


class DomainError(ParameterError):
    """Argument outside the domain of a scalar function (e.g. u not in [0, 1])."""


class SizeError(ParameterError):
    """Problem too large for exact enumeration."""


class OutOfRegionError(ErgmPhaseError, ValueError):
    """Requested quantity only exists inside the V-shaped region (beta1 < beta1_c)."""

    exit_code = 3


class NumericError(ErgmPhaseError, ArithmeticError):
    exit_code = 4


class BracketError(NumericError):
    """Root bracket endpoints do not have opposite signs."""


class BoundaryUnderflowError(NumericError):
    """A root lies closer to 0 or 1 than double precision can resolve."""


class CoexistenceError(NumericError):
    """Derivative requested on the transition curve, where it does not exist.

    ``branches`` holds the one-sided values, ordered (low branch, high branch).
    """

    def __init__(self, message, branches=()):
        super().__init__(message)
        self.branches = tuple(branches)


class CriticalDivergenceError(NumericError):
    """Second derivatives diverge (l'' vanishes at the maximizer)."""
