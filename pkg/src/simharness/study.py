"""
Monte Carlo study runner.

For each replicate of a cell: draw locations, covariates and an error field,
form y = g(x; theta0) + eps, fit (a BIC-selected lambda path when penalized)
and keep theta_hat. Cell metrics:

    MSE = sum_j sum_i (theta_hat_ij - theta0_i)^2 / (R p)
    SD  = sqrt( sum_j ||theta_hat_j - theta_bar||^2 / (R - 1) )
    TP  = mean count of nonzero estimates on the true support
    TN  = mean count of zero estimates off the true support
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from models.dataset import Dataset, ResponseScale
from models.errors import NumericalFailure, PMLSError, StudyFailure
from models.mean_functions import ModelKind
from objectives.objective import Method, ObjectiveSpec
from penalties.penalty import PenaltyFamily, PenaltySpec
from simharness.config import StudyCell, StudyConfig
from simharness.seeds import replicate_seed
from solver.config import Initialization, SolverConfig
from solver.coordinate_descent import NUMERICAL_ERRORS, fit
from solver.path import lambda_path
from solver.starts import single_index_start
from spatial.field import simulate_covariates, simulate_field
from spatial.sampling import SamplingDesign, sample_locations

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["mu", "sigma", "cov_model", "method", "penalty", "n", "mse", "sd", "tp", "tn"]


@dataclass(frozen=True)
class Metrics:
    mse: float
    sd: float
    tp: float
    tn: float
    replicates: int
    failures: int = 0


@dataclass(frozen=True)
class CellResult:
    cell: StudyCell
    metrics: Metrics

    def row(self) -> Dict[str, Any]:
        return {
            "mu": self.cell.mu,
            "sigma": self.cell.sigma,
            "cov_model": self.cell.covariance.name,
            "method": self.cell.method.value,
            "penalty": self.cell.penalty.value,
            "n": self.cell.n,
            "mse": self.metrics.mse,
            "sd": self.metrics.sd,
            "tp": self.metrics.tp,
            "tn": self.metrics.tn,
        }


def simulate_replicate(study: StudyConfig, cell: StudyCell, seed: int) -> Dataset:
    """Draw one sample of a cell; log scale, or raw (exp) for the Additive method."""
    rng = np.random.default_rng(seed)
    locations = sample_locations(SamplingDesign(), cell.n, rng)
    covariates = simulate_covariates(
        cell.n, study.n_covariates, study.covariate_correlation, rng, study.covariate_structure
    )
    errors = simulate_field(cell.covariance, locations, rng)
    y = study.model_spec.evaluate_matrix(covariates, np.asarray(study.true_theta)) + errors
    if cell.method is Method.ADDITIVE:
        return Dataset(locations, covariates, np.exp(y), scale=ResponseScale.RAW)
    return Dataset(locations, covariates, y, scale=ResponseScale.LOG)


def replicate_spec(study: StudyConfig, cell: StudyCell) -> ObjectiveSpec:
    """Objective of a cell; a logistic asymptote left unpenalized moves on the log scale."""
    exempt = frozenset(study.penalty_exempt)
    log_scale = frozenset({0}) & exempt if study.model is ModelKind.LOGISTIC else frozenset()
    return ObjectiveSpec(
        method=cell.method,
        model=study.model_spec,
        penalty=PenaltySpec(cell.penalty, 0.0, study.scad_a),
        exempt=exempt,
        log_scale=log_scale,
    )


def fit_replicate(
    study: StudyConfig,
    cell: StudyCell,
    data: Dataset,
    seed: int,
    config: Optional[Dict[str, Any]] = None,
) -> np.ndarray:
    """Estimate theta for one replicate; the path is BIC-selected when penalized."""
    spec = replicate_spec(study, cell)
    restarts = 0 if study.model_spec.is_linear_in_theta else study.random_restarts
    solver_config = SolverConfig.from_config(config, random_restarts=restarts, restart_seed=seed)
    if study.model is ModelKind.LOGISTIC:
        solver_config = solver_config.with_start(single_index_start(spec, data), Initialization.PROVIDED)
    if cell.penalty is PenaltyFamily.NONE:
        return fit(spec, data, solver_config).theta
    return lambda_path(spec, data, solver_config, study.grid_size).selected.theta


def run_replicate(
    study: StudyConfig,
    cell: StudyCell,
    replicate: int,
    config: Optional[Dict[str, Any]] = None,
) -> np.ndarray:
    """Simulate and fit one replicate.

    Raises:
        PMLSError: any library failure; stray linear-algebra or floating-point
            errors arrive as NumericalFailure
    """
    seed = replicate_seed(study.base_seed, cell.cell_id, replicate)
    try:
        data = simulate_replicate(study, cell, seed)
        return fit_replicate(study, cell, data, seed, config)
    except NUMERICAL_ERRORS as e:
        raise NumericalFailure(f"Replicate {replicate} of {cell.cell_id}: {type(e).__name__}: {e}") from e


def compute_metrics(estimates: np.ndarray, true_theta: Sequence[float], failures: int = 0) -> Metrics:
    """Aggregate an R x p matrix of estimates into cell metrics."""
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    theta0 = np.asarray(true_theta, dtype=float)
    support = theta0 != 0
    replicates, p = estimates.shape
    mse = float(np.sum((estimates - theta0) ** 2) / (replicates * p))
    if replicates > 1:
        spread = estimates - estimates.mean(axis=0)
        sd = float(np.sqrt(np.sum(spread * spread) / (replicates - 1)))
    else:
        sd = float("nan")
    nonzero = estimates != 0
    tp = float(np.mean(np.sum(nonzero[:, support], axis=1)))
    tn = float(np.mean(np.sum(~nonzero[:, ~support], axis=1)))
    return Metrics(mse=mse, sd=sd, tp=tp, tn=tn, replicates=replicates, failures=failures)


def _summarize_cell(study: StudyConfig, cell: StudyCell, estimates: List[Optional[np.ndarray]]) -> Metrics:
    failures = sum(1 for e in estimates if e is None)
    if failures > study.failure_budget * study.repetitions:
        raise StudyFailure(
            f"Cell {cell.cell_id}: {failures} of {study.repetitions} replicates failed "
            f"(budget {study.failure_budget:.0%})"
        )
    ok = [e for e in estimates if e is not None]
    metrics = compute_metrics(np.vstack(ok), study.true_theta, failures)
    logger.info(
        f"Cell {cell.cell_id}: mse={metrics.mse:.4g} sd={metrics.sd:.4g} "
        f"tp={metrics.tp:.3f} tn={metrics.tn:.3f} ({failures} failed)"
    )
    return metrics


def _run_cells(
    study: StudyConfig,
    cells: List[StudyCell],
    jobs: int,
    config: Optional[Dict[str, Any]],
) -> List[CellResult]:
    estimates = {(c, j): None for c in range(len(cells)) for j in range(study.repetitions)}

    def task(cell_index: int, replicate: int):
        cell = cells[cell_index]
        try:
            return run_replicate(study, cell, replicate, config)
        except PMLSError as e:
            logger.warning(f"Cell {cell.cell_id} replicate {replicate} failed: {e}")
            return None

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = {executor.submit(task, c, j): (c, j) for (c, j) in estimates}
        for future in as_completed(futures):
            estimates[futures[future]] = future.result()

    # single writer, index order
    return [
        CellResult(
            cell,
            _summarize_cell(study, cell, [estimates[(c, j)] for j in range(study.repetitions)]),
        )
        for c, cell in enumerate(cells)
    ]


def run_cell(
    study: StudyConfig,
    cell: StudyCell,
    jobs: int = 1,
    config: Optional[Dict[str, Any]] = None,
) -> Metrics:
    """Run every replicate of one cell and aggregate.

    Raises:
        StudyFailure: more than ``failure_budget`` of the replicates failed
    """
    return _run_cells(study, [cell], jobs, config)[0].metrics


def run_study(
    study: StudyConfig,
    jobs: int = 1,
    config: Optional[Dict[str, Any]] = None,
) -> List[CellResult]:
    """Run all cells; results are in table order and independent of ``jobs``.

    Workers are threads. They overlap inside NumPy and SciPy calls, which
    release the GIL, but the coordinate sweeps themselves run one at a time.

    Raises:
        StudyFailure: some cell exceeded its failure budget
    """
    cells = study.cells()
    logger.info(
        f"Running study '{study.name}': {len(cells)} cells x {study.repetitions} replicates "
        f"on {jobs} worker(s)"
    )
    return _run_cells(study, cells, jobs, config)


def results_frame(results: List[CellResult]) -> pd.DataFrame:
    return pd.DataFrame([r.row() for r in results], columns=TABLE_COLUMNS)


def write_tables(results: List[CellResult], out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write results.csv plus one table_<penalty>.csv per penalty family."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = results_frame(results)
    written = {}
    path = out_dir / "results.csv"
    frame.to_csv(path, index=False, float_format="%.17g")
    written["results"] = path
    for penalty in dict.fromkeys(frame["penalty"]):
        path = out_dir / f"table_{penalty}.csv"
        frame[frame["penalty"] == penalty].to_csv(path, index=False, float_format="%.17g")
        written[f"table_{penalty}"] = path
    logger.info(f"Wrote {len(written)} table(s) to {out_dir}")
    return written


def write_text_table(results: List[CellResult], path: Union[str, Path]) -> Path:
    """Aligned text rendering; MSE is shown in units of 0.01."""
    frame = results_frame(results)
    frame["mse"] = frame["mse"] * 100.0
    frame = frame.rename(columns={"mse": "mse(x0.01)"})
    path = Path(path)
    text = frame.to_string(index=False, float_format=lambda v: f"{v:.2f}")
    path.write_text(text + "\n")
    return path
