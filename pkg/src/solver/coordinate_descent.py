"""
Cyclic coordinate descent for the penalized objectives.

Each sweep visits theta_1..theta_p in order (POLS first sets b0 to its exact
minimizer mean(y - g)). For coordinate j:

    v_j = 2 ||g_j||^2           g_j = j-th gradient column (centered for PMLS)
    z_j = theta_j - G_j / v_j   G_j = smooth-part gradient
    u   = threshold(penalty, z_j, v_j / n)

which is the exact minimizer of the Gauss-Newton surrogate
v_j (u - z_j)^2 / 2 + n p_lambda(|u|). The proposal is accepted only if it is
feasible and the full objective does not increase; otherwise the step is
halved toward theta_j. The recorded objective is therefore nonincreasing.

Log-scale coordinates (positive asymptote parameters) take the same
Gauss-Newton step in log theta_j, clipped to +-MAX_LOG_STEP, so they stay
positive and cannot run off in one sweep.
"""
import logging
from typing import List, Optional

import numpy as np

from models.dataset import Dataset
from models.errors import InfeasibleParameter, NoFeasibleStart, NonFiniteObjective, NumericalFailure
from objectives.objective import (
    Method,
    ObjectiveSpec,
    center,
    join_params,
    objective_value,
    profiled_intercept,
    smooth_value,
    split_params,
)
from penalties.penalty import threshold
from solver.config import Initialization, SolverConfig
from solver.criteria import bic_or_none
from solver.results import FitResult

logger = logging.getLogger(__name__)

# coordinates whose curvature falls below this are left untouched
CURVATURE_FLOOR = 1e-14
# draws per random restart before giving up on finding a feasible point
MAX_RESTART_DRAWS = 100
RESTART_HALF_WIDTH = 0.5
MAX_LOG_STEP = 2.0
NUMERICAL_ERRORS = (np.linalg.LinAlgError, FloatingPointError, OverflowError, ZeroDivisionError)


def _safe_objective(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> float:
    try:
        value = objective_value(spec, data, params)
    except InfeasibleParameter:
        return np.inf
    return value if np.isfinite(value) else np.inf


def _initial_params(spec: ObjectiveSpec, data: Dataset, config: SolverConfig) -> np.ndarray:
    p = spec.model.dimension
    if config.initialization is Initialization.ZEROS:
        theta = np.zeros(p)
        intercept = None
    else:
        start = config.start_vector()
        if start.shape == (spec.n_params,):
            return start.copy()
        if spec.has_intercept and start.shape == (p,):
            theta, intercept = start, None
        else:
            raise NoFeasibleStart(
                f"Start vector has {start.shape[0]} entries, expected {spec.n_params}"
            )
    if spec.has_intercept:
        try:
            intercept = profiled_intercept(spec, data, theta)
        except InfeasibleParameter:
            intercept = 0.0
    return join_params(spec, intercept, theta)


def _restart_params(
    spec: ObjectiveSpec,
    data: Dataset,
    anchor_from: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Uniform[-0.5, 0.5]^p draw rejecting infeasible points; None if none found.

    Log-scale coordinates draw exp(u) instead.
    """
    p = spec.model.dimension
    offset = 1 if spec.has_intercept else 0
    positive = sorted(spec.log_scale)
    for _ in range(MAX_RESTART_DRAWS):
        theta = rng.uniform(-RESTART_HALF_WIDTH, RESTART_HALF_WIDTH, size=p)
        theta[positive] = np.exp(theta[positive])
        if spec.anchor is not None:
            theta[spec.anchor] = anchor_from[spec.anchor + offset]
        if not spec.model.is_feasible(data.covariates, theta):
            continue
        intercept = profiled_intercept(spec, data, theta) if spec.has_intercept else None
        return join_params(spec, intercept, theta)
    logger.warning(f"No feasible restart point in {MAX_RESTART_DRAWS} draws")
    return None


def _starting_points(spec: ObjectiveSpec, data: Dataset, config: SolverConfig) -> List[np.ndarray]:
    primary = _initial_params(spec, data, config)
    starts = []
    if np.isfinite(_safe_objective(spec, data, primary)):
        starts.append(primary)
    elif config.random_restarts == 0:
        raise NoFeasibleStart(
            f"{config.initialization.value} start is infeasible for the "
            f"{spec.model.kind.value} model and no restarts are configured"
        )
    else:
        logger.warning(f"{config.initialization.value} start infeasible, relying on random restarts")

    if config.random_restarts:
        rng = np.random.default_rng(config.restart_seed)
        for _ in range(config.random_restarts):
            candidate = _restart_params(spec, data, primary, rng)
            if candidate is not None:
                starts.append(candidate)

    if not starts:
        raise NoFeasibleStart("No feasible starting point among the configured starts")
    return starts


def _coordinate_scale(spec: ObjectiveSpec, column: np.ndarray, raw: np.ndarray):
    """Return (smooth gradient G_j, curvature v_j) for one coordinate."""
    if spec.method is Method.PMLS:
        column = center(column)
    return -2.0 * float(column @ raw), 2.0 * float(column @ column)


def _propose(spec: ObjectiveSpec, j: int, value: float, column: np.ndarray, raw: np.ndarray, n: int, penalized: bool):
    """Return (proposal, log_step) for coordinate j; log_step is None on the linear scale."""
    if j in spec.log_scale and value > 0:
        grad_j, curvature = _coordinate_scale(spec, column * value, raw)
        if curvature <= CURVATURE_FLOOR:
            return value, None
        log_step = float(np.clip(-grad_j / curvature, -MAX_LOG_STEP, MAX_LOG_STEP))
        return value * np.exp(log_step), log_step
    grad_j, curvature = _coordinate_scale(spec, column, raw)
    if curvature <= CURVATURE_FLOOR:
        return value, None
    z = value - grad_j / curvature
    return (threshold(spec.penalty, z, curvature / n) if penalized else z), None


def _descend(
    spec: ObjectiveSpec,
    data: Dataset,
    config: SolverConfig,
    params0: np.ndarray,
    hold: Optional[np.ndarray] = None,
) -> FitResult:
    params = np.array(params0, dtype=float)
    objective = _safe_objective(spec, data, params)
    if not np.isfinite(objective):
        raise NonFiniteObjective("Objective is not finite at the starting point")

    n = data.n
    offset = 1 if spec.has_intercept else 0
    mask = spec.penalty_mask()
    history = [objective]
    converged = False
    sweep = 0

    for sweep in range(1, config.max_outer_iterations + 1):
        previous = params.copy()
        previous_objective = objective

        if spec.has_intercept:
            candidate = params.copy()
            candidate[0] = profiled_intercept(spec, data, params[1:])
            value = _safe_objective(spec, data, candidate)
            if value <= objective:
                params, objective = candidate, value

        for j in range(spec.model.dimension):
            if j == spec.anchor or (hold is not None and hold[j]):
                continue
            k = j + offset
            intercept, theta = split_params(spec, params)
            column = spec.model.gradient_matrix(data.covariates, theta)[:, j]
            raw = data.response - spec.model.evaluate_matrix(data.covariates, theta)
            if intercept is not None:
                raw = raw - intercept
            proposal, log_step = _propose(spec, j, params[k], column, raw, n, mask[j])
            if proposal == params[k]:
                continue
            step = proposal - params[k]

            for halving in range(config.max_halvings + 1):
                candidate = params.copy()
                if halving == 0:
                    candidate[k] = proposal
                elif log_step is not None:
                    candidate[k] = params[k] * np.exp(log_step)
                else:
                    candidate[k] = params[k] + step
                value = _safe_objective(spec, data, candidate)
                if value <= objective:
                    params, objective = candidate, value
                    break
                step *= config.backtrack_factor
                if log_step is not None:
                    log_step *= config.backtrack_factor

        history.append(objective)
        max_change = float(np.max(np.abs(params - previous))) if params.size else 0.0
        decrease = previous_objective - objective
        scale = max(abs(previous_objective), 1.0)
        logger.debug(f"sweep {sweep}: objective={objective:.12g} max_change={max_change:.3e}")
        if max_change < config.coordinate_tolerance and decrease <= config.objective_tolerance * scale:
            converged = True
            break

    if not converged:
        logger.debug(f"Coordinate descent stopped after {sweep} sweeps without converging")

    intercept, theta = split_params(spec, params)
    return FitResult(
        params=params,
        theta=theta,
        intercept=intercept,
        active_set=tuple(int(j) for j in np.flatnonzero(theta != 0)),
        objective=objective,
        smooth_part=smooth_value(spec, data, params),
        iterations=sweep,
        converged=converged,
        bic=bic_or_none(
            spec, data, params, config.bic_centered_residuals, config.df_counts_intercept
        ),
        lambda_=spec.penalty.lam,
        method=spec.method.value,
        penalty=spec.penalty.family.value,
        history=tuple(history),
    )


def fit(
    spec: ObjectiveSpec,
    data: Dataset,
    config: SolverConfig,
    hold: Optional[np.ndarray] = None,
) -> FitResult:
    """Minimize the penalized objective by safeguarded cyclic coordinate descent.

    With random restarts configured, every feasible start is descended and
    the lowest final objective is returned. ``hold`` masks theta coordinates
    that keep their starting value.

    Raises:
        ScaleMismatch: data scale does not suit spec.method
        NoFeasibleStart: no feasible starting point
        NonFiniteObjective: objective not finite at a start
        NumericalFailure: a linear-algebra or floating-point error inside the descent
    """
    data.require_scale(spec.required_scale)
    best = None
    try:
        for start in _starting_points(spec, data, config):
            result = _descend(spec, data, config, start, hold)
            if best is None or result.objective < best.objective:
                best = result
    except NUMERICAL_ERRORS as e:
        raise NumericalFailure(
            f"{spec.method.value}/{spec.model.kind.value} fit failed: {type(e).__name__}: {e}"
        ) from e
    logger.debug(
        f"{spec.method.value}/{spec.penalty.family.value} fit at lambda={spec.penalty.lam:.4g}: "
        f"objective={best.objective:.10g}, active={len(best.active_set)}, sweeps={best.iterations}"
    )
    return best
