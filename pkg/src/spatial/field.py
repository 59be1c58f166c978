"""
Gaussian random fields and correlated covariates.

Covariance with nugget proportion:

    C(h) = sd^2 [ (1 - nugget) c(|h| / range) + nugget 1{h = 0} ]
    c(t) = exp(-t)      exponential
    c(t) = exp(-t^2)    gaussian

Fields are drawn as mean + L w with L the lower Cholesky factor of C. When
the factorization fails, a diagonal jitter of 1e-10, 1e-9, ..., 1e-6 times
sd^2 is tried in turn.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist

from models.dataset import Dataset, ResponseScale, save_csv
from models.errors import CovarianceNotPD, DataError
from spatial.sampling import SeedLike, as_generator

logger = logging.getLogger(__name__)

JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


class CovarianceFamily(str, Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"


class CovariateStructure(str, Enum):
    EQUICORRELATION = "equicorrelation"
    AR1 = "ar1"


@dataclass(frozen=True)
class CovarianceSpec:
    """Stationary isotropic covariance with a nugget proportion.

    Attributes:
        family: exponential or gaussian correlation
        range: rho > 0
        nugget: share of the variance at lag zero, in [0, 1]
        sd: marginal standard deviation
        mean: field mean mu
        name: label used in result tables (e.g. Exp1)
    """

    family: CovarianceFamily = CovarianceFamily.EXPONENTIAL
    range: float = 1.0
    nugget: float = 0.2
    sd: float = 1.0
    mean: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "family", CovarianceFamily(self.family))
        if not self.range > 0:
            raise DataError(f"Covariance range must be positive, got {self.range}")
        if not 0 <= self.nugget <= 1:
            raise DataError(f"Nugget proportion must lie in [0, 1], got {self.nugget}")
        if self.sd < 0:
            raise DataError(f"Field sd must be non-negative, got {self.sd}")
        if not self.name:
            prefix = "Exp" if self.family is CovarianceFamily.EXPONENTIAL else "Gauss"
            object.__setattr__(self, "name", f"{prefix}{self.range:g}")

    def correlation(self, h: np.ndarray) -> np.ndarray:
        t = np.asarray(h, dtype=float) / self.range
        if self.family is CovarianceFamily.EXPONENTIAL:
            return np.exp(-t)
        return np.exp(-t * t)

    def covariance(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        structured = (1.0 - self.nugget) * self.correlation(h)
        return self.sd ** 2 * (structured + self.nugget * (h == 0))


def covariance_matrix(cov: CovarianceSpec, locations: np.ndarray) -> np.ndarray:
    """Exactly symmetric n x n covariance matrix of the field at ``locations``."""
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    distances = cdist(locations, locations)
    matrix = cov.covariance(distances)
    return 0.5 * (matrix + matrix.T)


def cholesky_factor(matrix: np.ndarray, variance: float = 1.0) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter on failure.

    Raises:
        CovarianceNotPD: still not positive definite at the largest jitter
    """
    try:
        return linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        pass
    scale = variance if variance > 0 else 1.0
    identity = np.eye(matrix.shape[0])
    for jitter in JITTER_LADDER:
        logger.warning(f"Covariance not positive definite, retrying with jitter {jitter:g} * sd^2")
        try:
            return linalg.cholesky(matrix + jitter * scale * identity, lower=True)
        except linalg.LinAlgError:
            continue
    raise CovarianceNotPD(
        f"Covariance matrix ({matrix.shape[0]} x {matrix.shape[0]}) not positive definite "
        f"after jitter {JITTER_LADDER[-1]:g}"
    )


def simulate_field(cov: CovarianceSpec, locations: np.ndarray, seed: SeedLike) -> np.ndarray:
    """Draw one realization mean + L w of the field at ``locations``.

    Raises:
        CovarianceNotPD: covariance cannot be factorized even with jitter
    """
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    n = locations.shape[0]
    rng = as_generator(seed)
    if n > 1 and np.any(pdist(locations) == 0):
        logger.warning("Duplicate sampling locations; only the nugget separates them")
    if cov.sd == 0:
        return np.full(n, cov.mean)
    factor = cholesky_factor(covariance_matrix(cov, locations), cov.sd ** 2)
    w = rng.standard_normal(n)
    return cov.mean + factor @ w


def covariate_covariance(
    p: int,
    correlation: float,
    structure: CovariateStructure = CovariateStructure.EQUICORRELATION,
) -> np.ndarray:
    structure = CovariateStructure(structure)
    if structure is CovariateStructure.AR1:
        lags = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        return correlation ** lags
    sigma = np.full((p, p), correlation, dtype=float)
    np.fill_diagonal(sigma, 1.0)
    return sigma


def simulate_covariates(
    n: int,
    p: int,
    correlation: float,
    seed: SeedLike,
    structure: CovariateStructure = CovariateStructure.EQUICORRELATION,
) -> np.ndarray:
    """n i.i.d. rows from N_p(0, Sigma) with unit variances.

    Raises:
        DataError: invalid sizes or correlation outside [0, 1)
    """
    if n < 1 or p < 1:
        raise DataError(f"Covariate matrix needs n >= 1 and p >= 1, got {n} x {p}")
    if not 0 <= correlation < 1:
        raise DataError(f"Covariate correlation must lie in [0, 1), got {correlation}")
    rng = as_generator(seed)
    factor = linalg.cholesky(covariate_covariance(p, correlation, structure), lower=True)
    return rng.standard_normal((n, p)) @ factor.T


def export_dataset_csv(
    locations: np.ndarray,
    covariates: np.ndarray,
    response: np.ndarray,
    path: Union[str, Path],
    scale: ResponseScale = ResponseScale.LOG,
) -> Path:
    """Write a simulated sample in the dataset CSV format."""
    data = Dataset(locations, covariates, response, scale=scale)
    return save_csv(data, path)
