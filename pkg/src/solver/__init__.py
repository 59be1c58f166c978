"""
Coordinate-descent solver, lambda paths and BIC selection.

Usage:
    >>> from solver import SolverConfig, fit, lambda_path
    >>> result = lambda_path(spec, data, SolverConfig(), grid_size=30)
    >>> result.selected.theta
"""

from solver.config import Initialization, SolverConfig
from solver.coordinate_descent import fit
from solver.criteria import bic, bic_value, degrees_of_freedom, residual_variance
from solver.path import lambda_grid, lambda_max, lambda_path, null_fit, select_index, unpenalized_fit
from solver.starts import single_index_start
from solver.results import FitResult, PathResult, summary_lines, to_json_text, write_result

__all__ = [
    "Initialization",
    "SolverConfig",
    "fit",
    "bic",
    "bic_value",
    "degrees_of_freedom",
    "residual_variance",
    "lambda_grid",
    "lambda_max",
    "lambda_path",
    "null_fit",
    "select_index",
    "single_index_start",
    "unpenalized_fit",
    "FitResult",
    "PathResult",
    "summary_lines",
    "to_json_text",
    "write_result",
]
