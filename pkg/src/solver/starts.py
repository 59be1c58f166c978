"""
Starting points for the logistic model.

With Gaussian covariates the least-squares slope b of y on x is parallel to
beta whatever the link, so the start is theta = (t, kappa * b) with the
asymptote t and the scale kappa picked on log grids by the smooth objective.
Starting from zeros instead leaves every slope at a saddle (g is constant).
"""
import logging

import numpy as np

from models.dataset import Dataset
from models.errors import DataError, InfeasibleParameter
from models.mean_functions import ModelKind
from objectives.objective import ObjectiveSpec, join_params, profiled_intercept, smooth_value

logger = logging.getLogger(__name__)

SCALE_GRID = np.geomspace(0.1, 1000.0, 41)
ASYMPTOTE_GRID = np.exp(np.linspace(-3.0, 3.0, 13))


def _smooth_at(spec: ObjectiveSpec, data: Dataset, theta: np.ndarray) -> float:
    try:
        intercept = profiled_intercept(spec, data, theta) if spec.has_intercept else None
        value = smooth_value(spec, data, join_params(spec, intercept, theta))
    except InfeasibleParameter:
        return np.inf
    return value if np.isfinite(value) else np.inf


def single_index_start(spec: ObjectiveSpec, data: Dataset) -> np.ndarray:
    """theta start for the logistic model (theta only; POLS profiles b0).

    Raises:
        DataError: the model is not logistic, or no grid point is feasible
    """
    if spec.model.kind is not ModelKind.LOGISTIC:
        raise DataError(f"single_index_start needs the logistic model, got {spec.model.kind.value}")
    data.require_scale(spec.required_scale)
    design = np.column_stack([np.ones(data.n), data.covariates])
    coef, *_ = np.linalg.lstsq(design, data.response, rcond=None)
    slope = coef[1:]

    best, best_value = None, np.inf
    for asymptote in ASYMPTOTE_GRID:
        for scale in SCALE_GRID:
            theta = np.concatenate([[asymptote], scale * slope])
            value = _smooth_at(spec, data, theta)
            if value < best_value:
                best, best_value = theta, value
    if best is None:
        raise DataError("No feasible single-index start on the search grid")
    logger.debug(
        f"Single-index start: theta_1={best[0]:.4g}, scale={np.linalg.norm(best[1:]):.4g}, "
        f"smooth objective={best_value:.6g}"
    )
    return best
