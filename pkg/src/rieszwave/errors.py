"""Exception and warning types shared by every module."""


class RieszWaveError(Exception):
    """Base class for all package errors."""


class DomainError(RieszWaveError, ValueError):
    """An argument lies outside the domain of the requested evaluator."""


class ConvergenceError(RieszWaveError, ArithmeticError):
    """A series or quadrature hit its term/subdivision cap before converging."""


class BracketError(RieszWaveError, ValueError):
    """A root or sign-change bracket does not actually bracket a sign change."""


class ValidityWarning(UserWarning):
    """The returned value is computed correctly but does not represent the
    physical solution at that point (e.g. series evaluated at t = 0)."""


class GridResolutionWarning(UserWarning):
    """The scan grid is too coarse to separate neighbouring sign changes."""
