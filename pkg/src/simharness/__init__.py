"""
Monte Carlo simulation harness: study grids, seeded replicates, result tables
and empirical checks of the estimators' asymptotic behaviour.

Usage:
    >>> from simharness import StudyConfig, run_study, write_tables
    >>> study = StudyConfig.load("data/reference_study.json")
    >>> write_tables(run_study(study, jobs=4), "out/")
"""

from simharness.config import DEFAULT_THETA, StudyCell, StudyConfig
from simharness.seeds import replicate_rng, replicate_seed
from simharness.study import (
    TABLE_COLUMNS,
    CellResult,
    Metrics,
    compute_metrics,
    results_frame,
    run_cell,
    run_replicate,
    run_study,
    simulate_replicate,
    write_tables,
    write_text_table,
)
from simharness.theorems import TheoremCheck, TheoremReport, verify_theorems

__all__ = [
    "DEFAULT_THETA",
    "StudyCell",
    "StudyConfig",
    "replicate_rng",
    "replicate_seed",
    "TABLE_COLUMNS",
    "CellResult",
    "Metrics",
    "compute_metrics",
    "results_frame",
    "run_cell",
    "run_replicate",
    "run_study",
    "simulate_replicate",
    "write_tables",
    "write_text_table",
    "TheoremCheck",
    "TheoremReport",
    "verify_theorems",
]
