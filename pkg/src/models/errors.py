"""
Exception hierarchy shared by every pmls package.

The CLI maps these classes onto stable exit codes:

    DataError            -> 2  (bad input files, configs, scales, signs)
    SolverError          -> 3  (no feasible start, non-finite objective, ...)
    InfeasibleParameter  -> 3
    StudyFailure         -> 4  (a Monte Carlo cell exceeded its failure budget)

Library code raises the most specific subclass; callers that only care about
the category catch the base class.
"""
from typing import Optional


class PMLSError(Exception):
    """Base class for all errors raised by pmls."""


class DataError(PMLSError, ValueError):
    """Input data or configuration is unusable."""


class ConfigError(DataError):
    """A configuration file failed to parse or validate.

    Attributes:
        field_path: Dotted/indexed path of the offending field, if known
    """

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class ScaleMismatch(DataError):
    """Dataset response scale does not match what the estimation method needs."""


class SignChange(DataError):
    """Responses (or a scene curve) change sign where a single sign is required."""


class InfeasibleParameter(PMLSError, ValueError):
    """Parameter vector lies outside a model's feasibility region.

    Attributes:
        row: Index of the first data row violating feasibility
    """

    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(f"{message} (first offending row: {row})")


class SolverError(PMLSError, RuntimeError):
    """Numerical procedure could not produce a result."""


class NoFeasibleStart(SolverError):
    """No feasible initial point is available for coordinate descent."""


class NonFiniteObjective(SolverError):
    """Objective evaluated to NaN or infinity at an accepted iterate."""


class CovarianceNotPD(SolverError):
    """Covariance matrix stayed non positive definite after maximum jitter."""


class NumericalFailure(SolverError):
    """A linear-algebra or floating-point error escaped a numerical routine."""


class DegenerateVariance(PMLSError):
    """Residual variance estimate is not positive (constant residuals)."""


class StudyFailure(PMLSError):
    """A simulation cell exceeded its replicate-failure budget."""
