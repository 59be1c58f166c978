"""
Objective functions (PMLS, POLS, Additive) and their smooth-part gradients.
"""

from objectives.objective import (
    Method,
    ObjectiveSpec,
    Residuals,
    center,
    join_params,
    objective_gradient,
    objective_value,
    penalty_term,
    profiled_intercept,
    residuals,
    smooth_value,
    split_params,
)

__all__ = [
    "Method",
    "ObjectiveSpec",
    "Residuals",
    "center",
    "join_params",
    "objective_gradient",
    "objective_value",
    "penalty_term",
    "profiled_intercept",
    "residuals",
    "smooth_value",
    "split_params",
]
