"""
Penalty functions for pmls (none, LASSO, SCAD) and the coordinate-wise
thresholding operator.

Usage:
    >>> from penalties import PenaltySpec, PenaltyFamily, threshold
    >>> spec = PenaltySpec(PenaltyFamily.SCAD, lam=0.8)
    >>> threshold(spec, z=1.1, v=2.0)
"""

from penalties.penalty import (
    DEFAULT_SCAD_A,
    NegativeArgument,
    NonpositiveArgument,
    NonpositiveCurvature,
    PenaltyFamily,
    PenaltySpec,
    derivative_at_zero,
    penalty_derivative,
    penalty_sum,
    penalty_value,
    soft_threshold,
    threshold,
)

__all__ = [
    "DEFAULT_SCAD_A",
    "NegativeArgument",
    "NonpositiveArgument",
    "NonpositiveCurvature",
    "PenaltyFamily",
    "PenaltySpec",
    "derivative_at_zero",
    "penalty_derivative",
    "penalty_sum",
    "penalty_value",
    "soft_threshold",
    "threshold",
]
