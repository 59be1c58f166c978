"""
Core model package for pmls.

Holds the objects every estimation method acts on:

    Dataset     - locations, covariates and a raw (z) or log (y) response
    ModelSpec   - a mean function g(x; theta) with analytic gradient
    errors      - the exception hierarchy shared by all packages

Usage:
    >>> from models import Dataset, ModelKind, ModelSpec, evaluate
    >>> model = ModelSpec.for_covariates(ModelKind.LOG_LINEAR, data.n_covariates)
    >>> g = evaluate(model, data, theta)
"""

from models.dataset import (
    Dataset,
    ResponseScale,
    from_signed_measurements,
    load_csv,
    load_xyz,
    save_csv,
    save_xyz,
)
from models.mean_functions import (
    SURFACE_TERMS,
    ModelKind,
    ModelSpec,
    evaluate,
    gradient,
    polynomial_design,
)

__all__ = [
    "Dataset",
    "ResponseScale",
    "from_signed_measurements",
    "load_csv",
    "load_xyz",
    "save_csv",
    "save_xyz",
    "SURFACE_TERMS",
    "ModelKind",
    "ModelSpec",
    "evaluate",
    "gradient",
    "polynomial_design",
]
