"""
Regularization paths and BIC selection.

The grid runs from lambda_max (smallest lambda with an all-zero penalized
solution under the n * sum p_lambda scaling) down to
lambda_min_ratio * lambda_max, log-spaced, with warm starts chained in order.
lambda_max is read off the null fit: every penalized coordinate held at zero
while the exempt ones are descended to convergence.
"""
import logging
from typing import Optional

import numpy as np

from models.dataset import Dataset
from models.errors import DataError, InfeasibleParameter, NoFeasibleStart, NumericalFailure
from objectives.objective import (
    Method,
    ObjectiveSpec,
    join_params,
    objective_gradient,
    profiled_intercept,
    split_params,
)
from penalties.penalty import PenaltyFamily, PenaltySpec
from solver.config import Initialization, SolverConfig
from solver.coordinate_descent import NUMERICAL_ERRORS, fit
from solver.results import FitResult, PathResult

logger = logging.getLogger(__name__)

# relative size below which the null gradient is treated as vanishing
NULL_GRADIENT_FLOOR = 1e-10
# used when every penalized coordinate is already zero at the unpenalized fit
DEFAULT_LAMBDA_MAX = 1.0


def _null_theta(spec: ObjectiveSpec, config: SolverConfig) -> np.ndarray:
    """Penalized coordinates at zero, the others at their configured start."""
    theta = np.zeros(spec.model.dimension)
    start = config.start_vector()
    if start is not None and config.initialization is not Initialization.ZEROS:
        offset = 1 if spec.has_intercept and start.shape == (spec.n_params,) else 0
        free = ~spec.penalty_mask()
        theta[free] = start[offset:][free]
    return theta


def null_fit(spec: ObjectiveSpec, data: Dataset, config: SolverConfig) -> Optional[FitResult]:
    """Fit with every penalized coordinate held at zero; None when that model is infeasible."""
    theta = _null_theta(spec, config)
    try:
        intercept = profiled_intercept(spec, data, theta) if spec.has_intercept else None
    except InfeasibleParameter:
        return None
    null_config = config.with_start(
        join_params(spec, intercept, theta), Initialization.PROVIDED, random_restarts=0
    )
    try:
        return fit(spec, data, null_config, hold=spec.penalty_mask())
    except NoFeasibleStart as e:
        logger.debug(f"Null model unavailable: {e}")
        return None


def _curvatures(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> np.ndarray:
    _, theta = split_params(spec, params)
    jac = spec.model.gradient_matrix(data.covariates, theta)
    if spec.method is Method.PMLS:
        jac = jac - jac.mean(axis=0)
    return 2.0 * np.sum(jac * jac, axis=0)


def unpenalized_fit(spec: ObjectiveSpec, data: Dataset, config: SolverConfig) -> FitResult:
    """Fit with the penalty switched off (the theta-tilde of the path)."""
    free = spec.with_penalty(PenaltySpec(PenaltyFamily.NONE, 0.0, spec.penalty.scad_a))
    return fit(free, data, config)


def lambda_max(
    spec: ObjectiveSpec,
    data: Dataset,
    config: SolverConfig,
    unpenalized: Optional[FitResult] = None,
) -> float:
    """Smallest lambda at which every penalized coordinate is zero.

    At a feasible null fit this is max_j |G_j| / n over penalized j. When the
    null model is infeasible or a stationary saddle, falls back to
    max_j v_j |theta~_j| / n at the unpenalized fit theta~.
    """
    mask = spec.penalty_mask()
    if not mask.any():
        return DEFAULT_LAMBDA_MAX

    null = null_fit(spec, data, config)
    if null is not None:
        grad = objective_gradient(spec, data, null.params)
        offset = 1 if spec.has_intercept else 0
        penalized = np.abs(grad[offset:][mask])
        value = float(penalized.max()) / data.n
        scale = max(float(np.abs(grad).max()), float(np.abs(data.response).sum()), 1.0)
        if value > NULL_GRADIENT_FLOOR * scale / data.n:
            return value
        logger.debug("Null-model gradient vanishes, using the unpenalized-fit bound")

    if unpenalized is None:
        unpenalized = unpenalized_fit(spec, data, config)
    _, theta = split_params(spec, unpenalized.params)
    v = _curvatures(spec, data, unpenalized.params)
    value = float(np.max(v[mask] * np.abs(theta[mask]))) / data.n
    if value <= 0:
        logger.warning("Unpenalized fit is already all-zero; using a unit lambda_max")
        return DEFAULT_LAMBDA_MAX
    return value


def lambda_grid(lambda_max_value: float, grid_size: int, min_ratio: float = 1e-3) -> np.ndarray:
    """Log-spaced strictly decreasing grid from lambda_max to min_ratio * lambda_max."""
    if grid_size < 2:
        raise DataError(f"Lambda path needs grid_size >= 2, got {grid_size}")
    if not lambda_max_value > 0:
        raise DataError(f"lambda_max must be positive, got {lambda_max_value}")
    return np.geomspace(lambda_max_value, lambda_max_value * min_ratio, grid_size)


def select_index(bic_values) -> int:
    """Smallest BIC, ties resolving to the larger lambda.

    An undefined value (None) marks an exact fit and ranks below every finite
    BIC; the first exact fit on the path, the largest such lambda, wins.
    """
    best_index, best_value = 0, np.inf
    for i, value in enumerate(bic_values):
        if value is None:
            return i
        if value < best_value:
            best_index, best_value = i, value
    return best_index


def lambda_path(
    spec: ObjectiveSpec,
    data: Dataset,
    config: SolverConfig,
    grid_size: int,
) -> PathResult:
    """Fit a warm-started lambda path and select by BIC.

    The first point starts from ``config`` (restarts included); every later
    point starts from its predecessor alone.

    Raises:
        DataError: grid_size < 2
        SolverError: propagated from fit; NumericalFailure for linear-algebra
            or floating-point errors
    """
    if grid_size < 2:
        raise DataError(f"Lambda path needs grid_size >= 2, got {grid_size}")
    if spec.penalty.family is PenaltyFamily.NONE:
        raise DataError("A lambda path needs a lasso or scad penalty")
    data.require_scale(spec.required_scale)

    try:
        lambdas = lambda_grid(lambda_max(spec, data, config), grid_size, config.lambda_min_ratio)
    except NUMERICAL_ERRORS as e:
        raise NumericalFailure(f"lambda_max failed: {type(e).__name__}: {e}") from e

    fits = []
    previous = None
    for lam in lambdas:
        point_spec = spec.with_penalty(spec.penalty.with_lambda(lam))
        point_config = config if previous is None else config.with_start(previous.params, random_restarts=0)
        previous = fit(point_spec, data, point_config)
        fits.append(previous)

    bic_values = tuple(f.bic for f in fits)
    selected = select_index(bic_values)
    logger.info(
        f"{spec.method.value}/{spec.penalty.family.value} path: {grid_size} points, "
        f"lambda in [{lambdas[-1]:.4g}, {lambdas[0]:.4g}], selected lambda={lambdas[selected]:.4g} "
        f"with {len(fits[selected].active_set)} active coefficients"
    )
    return PathResult(
        lambdas=tuple(float(x) for x in lambdas),
        fits=tuple(fits),
        bic_values=bic_values,
        selected_index=selected,
    )
