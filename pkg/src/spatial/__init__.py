"""
Spatial sampling design and Gaussian random field simulation.
"""

from spatial.field import (
    JITTER_LADDER,
    CovarianceFamily,
    CovarianceSpec,
    CovariateStructure,
    cholesky_factor,
    covariance_matrix,
    covariate_covariance,
    export_dataset_csv,
    simulate_covariates,
    simulate_field,
)
from spatial.sampling import Density, SamplingDesign, as_generator, sample_locations

__all__ = [
    "JITTER_LADDER",
    "CovarianceFamily",
    "CovarianceSpec",
    "CovariateStructure",
    "cholesky_factor",
    "covariance_matrix",
    "covariate_covariance",
    "export_dataset_csv",
    "simulate_covariates",
    "simulate_field",
    "Density",
    "SamplingDesign",
    "as_generator",
    "sample_locations",
]
