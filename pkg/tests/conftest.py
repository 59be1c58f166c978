"""
Pytest configuration and shared fixtures for all tests.

This module provides shared fixtures and configuration for the test suite,
including:
- Isolation from a base seed exported in the developer's shell
- Restoring root logging handlers after CLI runs
- Small deterministic datasets used across modules
"""
import logging
from pathlib import Path

import numpy as np
import pytest

from config import SEED_ENV_VAR
from models.dataset import Dataset, ResponseScale

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(autouse=True)
def clear_seed_env(monkeypatch):
    """Tests choose their own seeds; an exported MLS_SEED must not leak in."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    monkeypatch.delenv("PMLS_DEBUG", raising=False)


@pytest.fixture(autouse=True)
def restore_root_logging():
    """The CLI replaces the root handlers; put pytest's back afterwards."""
    root = logging.getLogger()
    handlers = list(root.handlers)
    level = root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def linear_data() -> Dataset:
    """n = 60 log-scale sample from y = x'(1, -2, 0, 0.5) + N(0.4, 0.1^2)."""
    rng = np.random.default_rng(7)
    n = 60
    locations = rng.uniform(0, np.sqrt(n), size=(n, 2))
    covariates = rng.standard_normal((n, 4))
    theta = np.array([1.0, -2.0, 0.0, 0.5])
    y = covariates @ theta + 0.4 + 0.1 * rng.standard_normal(n)
    return Dataset(locations, covariates, y, scale=ResponseScale.LOG)


@pytest.fixture
def loglinear_raw_data() -> Dataset:
    """n = 80 raw sample z = x'(2, 1, 0.5) * exp(eps) with an intercept column."""
    rng = np.random.default_rng(11)
    n = 80
    locations = rng.uniform(0, np.sqrt(n), size=(n, 2))
    covariates = np.column_stack([np.ones(n), rng.uniform(0, 1, size=(n, 2))])
    theta = np.array([2.0, 1.0, 0.5])
    z = (covariates @ theta) * np.exp(0.05 * rng.standard_normal(n))
    return Dataset(locations, covariates, z, scale=ResponseScale.RAW)
