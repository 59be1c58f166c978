"""
Objective functions for the three estimation methods.

    PMLS      S_n(theta) = sum_i (r_i - mean(r))^2,         r = y - g(x; theta)
    POLS      sum_i (y_i - b0 - g_i)^2,                      params = [b0, theta]
    Additive  sum_i (z_i - g_i)^2                            raw-scale response

Each penalized objective adds n * sum_j p_lambda(|theta_j|) over coordinates
that are neither penalty-exempt nor the anchor. The POLS intercept b0 is
never penalized. Centering is subtract-the-mean; the centering matrix
I - 11'/n is never built.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple

import numpy as np

from models.dataset import Dataset, ResponseScale
from models.errors import DataError
from models.mean_functions import ModelSpec
from penalties.penalty import PenaltySpec, penalty_sum

logger = logging.getLogger(__name__)


class Method(str, Enum):
    PMLS = "pmls"
    POLS = "pols"
    ADDITIVE = "additive"


REQUIRED_SCALE = {
    Method.PMLS: ResponseScale.LOG,
    Method.POLS: ResponseScale.LOG,
    Method.ADDITIVE: ResponseScale.RAW,
}


@dataclass(frozen=True)
class ObjectiveSpec:
    """What is being minimized.

    Attributes:
        method: PMLS, POLS or Additive
        model: Mean function
        penalty: Penalty family and lambda
        exempt: theta indices excluded from the penalty
        anchor: theta index held at its starting value (not updated, not penalized)
        log_scale: exempt indices the solver moves multiplicatively, keeping them positive
    """

    method: Method
    model: ModelSpec
    penalty: PenaltySpec = field(default_factory=PenaltySpec)
    exempt: FrozenSet[int] = frozenset()
    anchor: Optional[int] = None
    log_scale: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "exempt", frozenset(int(j) for j in self.exempt))
        object.__setattr__(self, "log_scale", frozenset(int(j) for j in self.log_scale))
        if not self.log_scale <= self.exempt:
            raise DataError(
                f"Log-scale indices {sorted(self.log_scale - self.exempt)} must be penalty-exempt"
            )
        p = self.model.dimension
        bad = [j for j in self.exempt if not 0 <= j < p]
        if bad:
            raise DataError(f"Penalty-exempt indices {sorted(bad)} outside 0..{p - 1}")
        if self.anchor is not None and not 0 <= self.anchor < p:
            raise DataError(f"Anchor index {self.anchor} outside 0..{p - 1}")

    @property
    def has_intercept(self) -> bool:
        return self.method is Method.POLS

    @property
    def n_params(self) -> int:
        return self.model.dimension + (1 if self.has_intercept else 0)

    @property
    def required_scale(self) -> ResponseScale:
        return REQUIRED_SCALE[self.method]

    def penalty_mask(self) -> np.ndarray:
        """Boolean mask over theta: True where the penalty applies."""
        mask = np.ones(self.model.dimension, dtype=bool)
        for j in self.exempt:
            mask[j] = False
        if self.anchor is not None:
            mask[self.anchor] = False
        return mask

    def with_penalty(self, penalty: PenaltySpec) -> "ObjectiveSpec":
        return ObjectiveSpec(self.method, self.model, penalty, self.exempt, self.anchor, self.log_scale)


@dataclass(frozen=True)
class Residuals:
    """Raw residuals, and their centered version for PMLS."""

    raw: np.ndarray
    centered: Optional[np.ndarray] = None

    @property
    def working(self) -> np.ndarray:
        """The residual vector whose squared norm is the smooth objective."""
        return self.raw if self.centered is None else self.centered


def center(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return values - values.mean()


def split_params(spec: ObjectiveSpec, params: np.ndarray) -> Tuple[Optional[float], np.ndarray]:
    """Separate (b0, theta) for POLS; b0 is None for the other methods."""
    params = np.asarray(params, dtype=float)
    if params.shape != (spec.n_params,):
        raise DataError(f"Expected {spec.n_params} parameters, got {params.shape}")
    if spec.has_intercept:
        return float(params[0]), params[1:]
    return None, params


def join_params(spec: ObjectiveSpec, intercept: Optional[float], theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if spec.has_intercept:
        return np.concatenate([[0.0 if intercept is None else float(intercept)], theta])
    return theta.copy()


def _check_scale(spec: ObjectiveSpec, data: Dataset) -> None:
    data.require_scale(spec.required_scale)


def residuals(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> Residuals:
    """Residuals at ``params``.

    Raises:
        InfeasibleParameter: theta infeasible for some row
        ScaleMismatch: data scale does not suit spec.method
    """
    _check_scale(spec, data)
    intercept, theta = split_params(spec, params)
    raw = data.response - spec.model.evaluate_matrix(data.covariates, theta)
    if intercept is not None:
        raw = raw - intercept
    if spec.method is Method.PMLS:
        return Residuals(raw=raw, centered=center(raw))
    return Residuals(raw=raw)


def smooth_value(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> float:
    """The un-penalized part of the objective."""
    r = residuals(spec, data, params).working
    return float(r @ r)


def penalty_term(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> float:
    _, theta = split_params(spec, params)
    return data.n * penalty_sum(spec.penalty, theta, spec.penalty_mask())


def objective_value(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> float:
    """Penalized objective: smooth part + n * sum of penalties.

    Raises:
        InfeasibleParameter: theta infeasible for some row
        ScaleMismatch: data scale does not suit spec.method
    """
    return smooth_value(spec, data, params) + penalty_term(spec, data, params)


def objective_gradient(spec: ObjectiveSpec, data: Dataset, params: np.ndarray) -> np.ndarray:
    """Gradient of the smooth part only; the penalty is handled by the solver.

    PMLS uses -2 G'r + 2 mean(r) colsum(G), which equals -2 G'(centered r)
    without forming the centering matrix.
    """
    _check_scale(spec, data)
    intercept, theta = split_params(spec, params)
    jac = spec.model.gradient_matrix(data.covariates, theta)
    raw = residuals(spec, data, params).raw

    grad = -2.0 * (jac.T @ raw)
    if spec.method is Method.PMLS:
        grad = grad + 2.0 * raw.mean() * jac.sum(axis=0)
        return grad
    if spec.method is Method.POLS:
        return np.concatenate([[-2.0 * raw.sum()], grad])
    return grad


def profiled_intercept(spec: ObjectiveSpec, data: Dataset, theta: np.ndarray) -> float:
    """POLS intercept minimizing the smooth part for fixed theta: mean(y - g)."""
    g = spec.model.evaluate_matrix(data.covariates, theta)
    return float(np.mean(data.response - g))
