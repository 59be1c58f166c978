"""
Three-way comparison of surface fits on a point cloud.

    Additive  penalized LS of |z| on (1, x, y, x^2, y^2, xy)
    POLS      log|z| = b0 + log(x~'theta) + eps, all of theta penalized
    PMLS      log|z| = log(x~'theta) + eps with centered residuals; the
              intercept is anchored at theta_1 = 1

All three fit on the design with each column divided by its standard
deviation, so the SCAD knots sit on one scale for every term, and map back
as theta / scale. The Additive intercept is not penalized. PMLS is invariant
to the scale of theta, so after fitting both log-scale methods are rescaled
by c = mean(|z| / x~'theta_hat). Every method runs a BIC-selected lambda
path. Coefficients are reported with the cloud's sign.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from models.dataset import Dataset, ResponseScale
from models.mean_functions import SURFACE_TERMS, ModelKind, ModelSpec, polynomial_design
from objectives.objective import Method, ObjectiveSpec
from penalties.penalty import DEFAULT_SCAD_A, PenaltyFamily, PenaltySpec
from solver.config import Initialization, SolverConfig
from solver.path import lambda_path

logger = logging.getLogger(__name__)

METHOD_ORDER = (Method.ADDITIVE, Method.POLS, Method.PMLS)
METHOD_LABELS = {Method.ADDITIVE: "Additive", Method.POLS: "POLS", Method.PMLS: "PMLS"}
COMPARISON_COLUMNS = ["method"] + list(SURFACE_TERMS)


@dataclass(frozen=True)
class MethodRow:
    method: Method
    coefficients: Tuple[float, ...]
    selected_lambda: float

    @property
    def active_set(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coefficients) if c != 0)

    @property
    def active_terms(self) -> Tuple[str, ...]:
        return tuple(SURFACE_TERMS[i] for i in self.active_set)


@dataclass(frozen=True)
class ComparisonTable:
    """Coefficient table with rows Additive, POLS, PMLS."""

    rows: Tuple[MethodRow, ...]

    def row(self, method: Union[Method, str]) -> MethodRow:
        method = Method(method)
        for r in self.rows:
            if r.method is method:
                return r
        raise KeyError(method.value)

    def to_frame(self) -> pd.DataFrame:
        records = [
            {"method": METHOD_LABELS[r.method], **dict(zip(SURFACE_TERMS, r.coefficients))}
            for r in self.rows
        ]
        return pd.DataFrame(records, columns=COMPARISON_COLUMNS)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    def to_text(self) -> str:
        return self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.4f}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            METHOD_LABELS[r.method]: {
                "coefficients": dict(zip(SURFACE_TERMS, r.coefficients)),
                "selected_lambda": r.selected_lambda,
            }
            for r in self.rows
        }


def design_dataset(data: Dataset) -> Dataset:
    """log|z| against the six-term polynomial design."""
    data.require_scale(ResponseScale.RAW)
    return Dataset(
        locations=data.locations,
        covariates=polynomial_design(data.covariates),
        response=np.log(data.response),
        scale=ResponseScale.LOG,
        sign=data.sign,
    )


def log_linear_start(design: np.ndarray, magnitude: np.ndarray) -> np.ndarray:
    """Least-squares fit of |z| on the design; intercept-only if that is infeasible."""
    start, *_ = np.linalg.lstsq(design, magnitude, rcond=None)
    if np.all(design @ start > 0):
        return start
    logger.warning("Least-squares start is infeasible for the log-linear model, using intercept only")
    fallback = np.zeros(design.shape[1])
    fallback[0] = float(np.mean(magnitude))
    return fallback


def rescale_to_moment(design: np.ndarray, magnitude: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """theta * mean(|z| / x~'theta), matching the unit-mean multiplicative error."""
    scale = float(np.mean(magnitude / (design @ theta)))
    return scale * theta


def column_scales(design: np.ndarray) -> np.ndarray:
    """Column standard deviations; constant columns keep scale 1."""
    scales = np.std(design, axis=0)
    return np.where(scales > 0, scales, 1.0)


def standardized(data: Dataset) -> Tuple[Dataset, np.ndarray]:
    """Covariates divided by their column scales, plus the scales.

    theta fitted on the result maps back as theta / scales.
    """
    scales = column_scales(data.covariates)
    scaled = Dataset(
        locations=data.locations,
        covariates=data.covariates / scales,
        response=data.response,
        scale=data.scale,
        sign=data.sign,
    )
    return scaled, scales


def _fit_additive(
    data: Dataset,
    penalty: PenaltySpec,
    config: SolverConfig,
    grid_size: int,
) -> MethodRow:
    design = polynomial_design(data.covariates)
    scaled, scales = standardized(
        Dataset(data.locations, design, data.response, scale=ResponseScale.RAW, sign=data.sign)
    )
    spec = ObjectiveSpec(
        Method.ADDITIVE, ModelSpec(ModelKind.LINEAR, design.shape[1]), penalty, exempt=frozenset({0})
    )
    path = lambda_path(spec, scaled, config, grid_size)
    theta = path.selected.theta / scales * data.sign
    return MethodRow(Method.ADDITIVE, tuple(float(t) for t in theta), path.selected_lambda)


def _fit_log_linear(
    method: Method,
    data: Dataset,
    penalty: PenaltySpec,
    config: SolverConfig,
    grid_size: int,
) -> MethodRow:
    logged = design_dataset(data)
    design = logged.covariates
    scaled, scales = standardized(logged)
    start = log_linear_start(design, data.response) * scales
    anchor = None
    if method is Method.PMLS:
        start = start / start[0]
        anchor = 0
    spec = ObjectiveSpec(method, ModelSpec(ModelKind.LOG_LINEAR, design.shape[1]), penalty, anchor=anchor)
    path = lambda_path(
        spec, scaled, config.with_start(start, Initialization.PROVIDED, random_restarts=0), grid_size
    )
    theta = rescale_to_moment(design, data.response, path.selected.theta / scales) * data.sign
    return MethodRow(method, tuple(float(t) for t in theta), path.selected_lambda)


def compare_methods(
    data: Dataset,
    penalty: Union[PenaltyFamily, str] = PenaltyFamily.SCAD,
    config: Optional[Dict[str, Any]] = None,
    grid_size: Optional[int] = None,
) -> ComparisonTable:
    """Fit Additive, POLS and PMLS surfaces and tabulate their coefficients.

    Raises:
        ScaleMismatch: data is not raw-scale
        SolverError: propagated from the fits
    """
    data.require_scale(ResponseScale.RAW)
    config = config or {}
    scad_a = ((config.get("penalty") or {}).get("scad_a", DEFAULT_SCAD_A))
    penalty_spec = PenaltySpec(PenaltyFamily(penalty), 0.0, float(scad_a))
    if grid_size is None:
        grid_size = int((config.get("path") or {}).get("grid_size", 30))
    solver_config = SolverConfig.from_config(config)

    rows: List[MethodRow] = []
    for method in METHOD_ORDER:
        if method is Method.ADDITIVE:
            row = _fit_additive(data, penalty_spec, solver_config, grid_size)
        else:
            row = _fit_log_linear(method, data, penalty_spec, solver_config, grid_size)
        logger.info(
            f"{METHOD_LABELS[method]}: active terms {', '.join(row.active_terms) or 'none'} "
            f"at lambda={row.selected_lambda:.4g}"
        )
        rows.append(row)
    return ComparisonTable(tuple(rows))
