"""
BIC-type tuning criterion:

    BIC = log(sigma2) + log(n) * df / n,   sigma2 = mean(r^2) - mean(r)^2

with r the uncentered residuals (y - g, y - b0 - g, or z - g) and df the
number of nonzero penalized coefficients.
"""
import logging
from typing import Optional

import numpy as np

from models.dataset import Dataset
from models.errors import DegenerateVariance
from objectives.objective import ObjectiveSpec, residuals, split_params

logger = logging.getLogger(__name__)

# sigma2 at or below this fraction of max(mean(r^2), reference) counts as zero
DEGENERATE_VARIANCE_RATIO = 1e-12


def residual_variance(r: np.ndarray, reference: float = 0.0) -> float:
    """sigma2 = mean(r^2) - mean(r)^2.

    ``reference`` is a variance the residuals are judged against, normally
    var(y); an exact fit leaves only rounding noise far below it.

    Raises:
        DegenerateVariance: residuals are constant up to rounding
    """
    r = np.asarray(r, dtype=float)
    second = float(np.mean(r * r))
    first = float(np.mean(r))
    sigma2 = second - first * first
    if not sigma2 > DEGENERATE_VARIANCE_RATIO * max(second, reference):
        raise DegenerateVariance(f"Residual variance is not positive (sigma2 = {sigma2:.3e})")
    return sigma2


def degrees_of_freedom(spec: ObjectiveSpec, params: np.ndarray, count_intercept: bool = False) -> int:
    intercept, theta = split_params(spec, params)
    df = int(np.count_nonzero(theta[spec.penalty_mask()]))
    if count_intercept and intercept is not None and intercept != 0:
        df += 1
    return df


def bic_value(
    spec: ObjectiveSpec,
    data: Dataset,
    params: np.ndarray,
    centered: bool = False,
    count_intercept: bool = False,
) -> float:
    """BIC at a parameter vector.

    Raises:
        DegenerateVariance: residuals are constant
    """
    res = residuals(spec, data, params)
    r = res.raw - res.raw.mean() if centered else res.raw
    sigma2 = residual_variance(r, float(np.var(data.response)))
    df = degrees_of_freedom(spec, params, count_intercept)
    n = data.n
    return float(np.log(sigma2) + np.log(n) * df / n)


def bic(fit, data: Dataset, spec: ObjectiveSpec, config=None) -> float:
    """BIC of a FitResult on the data it was fitted to.

    Raises:
        DegenerateVariance: residuals are constant
    """
    centered = bool(config.bic_centered_residuals) if config is not None else False
    count_intercept = bool(config.df_counts_intercept) if config is not None else False
    return bic_value(spec, data, fit.params, centered, count_intercept)


def bic_or_none(
    spec: ObjectiveSpec,
    data: Dataset,
    params: np.ndarray,
    centered: bool = False,
    count_intercept: bool = False,
) -> Optional[float]:
    try:
        return bic_value(spec, data, params, centered, count_intercept)
    except DegenerateVariance as e:
        logger.debug(f"BIC undefined: {e}")
        return None
