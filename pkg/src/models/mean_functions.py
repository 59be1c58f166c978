"""
Regression mean functions g(x; theta) and their analytic gradients.

Supported kinds:

    LogLinear            g = log(x'theta)                      feasible iff x'theta > 0
    Logistic             g = 1 / (1 + t1 exp(-t[2:]'x))        feasible iff denominator != 0
    PolynomialSurface2D  g = t1 + t2 x + t3 y + t4 x^2 + t5 y^2 + t6 xy   (p = 6)
    LinearAdditive       g = x'theta

Infeasible parameters are rejected (InfeasibleParameter naming the first
offending row); nothing is clamped. Second derivatives are not provided.
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from models.dataset import Dataset
from models.errors import DataError, InfeasibleParameter

logger = logging.getLogger(__name__)

# |1 + t1 exp(-b'x)| at or below this is treated as a pole of the logistic curve
LOGISTIC_POLE_TOLERANCE = 1e-12

SURFACE_TERMS = ("intercept", "x", "y", "x2", "y2", "xy")


class ModelKind(str, Enum):
    LOG_LINEAR = "loglinear"
    LOGISTIC = "logistic"
    SURFACE_2D = "surface2d"
    LINEAR = "linear"


def polynomial_design(coords: np.ndarray) -> np.ndarray:
    """Expand (x, y) coordinates into the design (1, x, y, x^2, y^2, xy)."""
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise DataError(f"Polynomial surface needs two covariate columns, got shape {coords.shape}")
    x, y = coords[:, 0], coords[:, 1]
    return np.column_stack([np.ones_like(x), x, y, x * x, y * y, x * y])


@dataclass(frozen=True)
class ModelSpec:
    """A mean function family with a fixed parameter count.

    Attributes:
        kind: Which mean function
        dimension: Number of parameters p
    """

    kind: ModelKind
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.dimension < 1:
            raise DataError(f"Model dimension must be positive, got {self.dimension}")
        if self.kind is ModelKind.SURFACE_2D and self.dimension != 6:
            raise DataError("PolynomialSurface2D has exactly 6 parameters")
        if self.kind is ModelKind.LOGISTIC and self.dimension < 2:
            raise DataError("Logistic model needs at least 2 parameters")

    @classmethod
    def for_covariates(cls, kind: ModelKind, n_covariates: int) -> "ModelSpec":
        """Build the spec whose dimension matches a covariate matrix width."""
        kind = ModelKind(kind)
        if kind is ModelKind.LOGISTIC:
            return cls(kind, n_covariates + 1)
        if kind is ModelKind.SURFACE_2D:
            if n_covariates != 2:
                raise DataError(
                    f"PolynomialSurface2D needs 2 covariates (x, y), got {n_covariates}"
                )
            return cls(kind, 6)
        return cls(kind, n_covariates)

    @property
    def is_linear_in_theta(self) -> bool:
        return self.kind in (ModelKind.LINEAR, ModelKind.SURFACE_2D)

    def expected_covariates(self) -> int:
        if self.kind is ModelKind.LOGISTIC:
            return self.dimension - 1
        if self.kind is ModelKind.SURFACE_2D:
            return 2
        return self.dimension

    def _check_shapes(self, covariates: np.ndarray, theta: np.ndarray) -> None:
        if theta.shape != (self.dimension,):
            raise DataError(
                f"{self.kind.value} model expects {self.dimension} parameters, got {theta.shape[0]}"
            )
        if covariates.shape[1] != self.expected_covariates():
            raise DataError(
                f"{self.kind.value} model expects {self.expected_covariates()} covariates, "
                f"got {covariates.shape[1]}"
            )

    def _logistic_parts(self, covariates: np.ndarray, theta: np.ndarray):
        with np.errstate(over="ignore", invalid="ignore"):
            expo = np.exp(-(covariates @ theta[1:]))
            denom = 1.0 + theta[0] * expo
        bad = ~np.isfinite(expo) | ~np.isfinite(denom) | (np.abs(denom) <= LOGISTIC_POLE_TOLERANCE)
        if bad.any():
            raise InfeasibleParameter(
                "Logistic denominator vanishes or overflows", int(np.flatnonzero(bad)[0])
            )
        return expo, denom

    def _linear_index(self, covariates: np.ndarray, theta: np.ndarray) -> np.ndarray:
        index = covariates @ theta
        bad = ~(index > 0)
        if bad.any():
            raise InfeasibleParameter("LogLinear index x'theta must be positive", int(np.flatnonzero(bad)[0]))
        return index

    def evaluate_matrix(self, covariates: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """g(x_i; theta) for every row of a covariate matrix."""
        theta = np.asarray(theta, dtype=float)
        self._check_shapes(covariates, theta)

        if self.kind is ModelKind.LINEAR:
            return covariates @ theta
        if self.kind is ModelKind.SURFACE_2D:
            return polynomial_design(covariates) @ theta
        if self.kind is ModelKind.LOG_LINEAR:
            return np.log(self._linear_index(covariates, theta))
        _, denom = self._logistic_parts(covariates, theta)
        return 1.0 / denom

    def gradient_matrix(self, covariates: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """n x p matrix of partial derivatives dg(x_i; theta)/dtheta_k."""
        theta = np.asarray(theta, dtype=float)
        self._check_shapes(covariates, theta)

        if self.kind is ModelKind.LINEAR:
            return np.array(covariates, dtype=float)
        if self.kind is ModelKind.SURFACE_2D:
            return polynomial_design(covariates)
        if self.kind is ModelKind.LOG_LINEAR:
            index = self._linear_index(covariates, theta)
            return covariates / index[:, None]

        expo, denom = self._logistic_parts(covariates, theta)
        # expo / denom stays bounded where denom^2 would overflow
        share = (expo / denom) / denom
        grad = np.empty((covariates.shape[0], self.dimension))
        grad[:, 0] = -share
        grad[:, 1:] = (theta[0] * share)[:, None] * covariates
        return grad

    def is_feasible(self, covariates: np.ndarray, theta: np.ndarray) -> bool:
        try:
            self.evaluate_matrix(covariates, theta)
        except InfeasibleParameter:
            return False
        return True


def evaluate(model: ModelSpec, data: Dataset, theta: np.ndarray) -> np.ndarray:
    """Return g(x(s_i); theta) for each row of ``data``, in row order.

    Raises:
        InfeasibleParameter: theta is outside the feasibility region for some row
    """
    return model.evaluate_matrix(data.covariates, theta)


def gradient(model: ModelSpec, data: Dataset, theta: np.ndarray) -> np.ndarray:
    """Return the n x p gradient matrix G(theta) of the mean function.

    Raises:
        InfeasibleParameter: theta is outside the feasibility region for some row
    """
    return model.gradient_matrix(data.covariates, theta)
