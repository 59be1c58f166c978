"""
Settings and input documents.

Settings are layered: built-in defaults, then the first config.yml found
(working directory, its parents, the project root), then ``--config``, then
flags. Study and scene files are read with the same YAML loader and checked
against their JSON schemas by ``validate_document``.

    >>> from config import load_config, get_base_seed
    >>> seed = get_base_seed(load_config())
"""
import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

import yaml
from jsonschema import ValidationError, validate

from models.errors import ConfigError

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "MLS_SEED"
DEFAULT_SEED = 20240917
CONFIG_FILENAME = "config.yml"
PROJECT_ROOT = Path(__file__).resolve().parents[2]


def _config_candidates() -> Iterator[Path]:
    cwd = Path.cwd()
    for directory in (cwd, *cwd.parents, PROJECT_ROOT):
        yield directory / CONFIG_FILENAME


def _read_mapping(path: Path) -> Dict[str, Any]:
    """YAML (or JSON) mapping at ``path``.

    Raises:
        ConfigError: unparsable, or the root is not a mapping
    """
    try:
        document = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"could not parse: {e}", str(path)) from e
    if not isinstance(document, dict):
        raise ConfigError("root must be a mapping", str(path))
    return document


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Defaults merged with config.yml; a missing or broken file leaves the defaults."""
    if config_path is not None:
        path = Path(config_path)
    else:
        path = next((c for c in _config_candidates() if c.is_file()), None)
    if path is None or not path.is_file():
        logger.warning(f"No usable {CONFIG_FILENAME} ({config_path or 'search'}), using defaults")
        return get_default_config()
    try:
        overrides = _read_mapping(path)
    except ConfigError as e:
        logger.error(f"Ignoring {path}: {e}")
        return get_default_config()
    logger.info(f"Loaded configuration from {path}")
    return merge_overrides(get_default_config(), overrides)


def get_default_config() -> Dict[str, Any]:
    """Return the configuration used when config.yml is not available."""
    return {
        "seed": DEFAULT_SEED,
        "solver": {
            "max_outer_iterations": 500,
            "coordinate_tolerance": 1e-7,
            "objective_tolerance": 1e-10,
            "backtrack_factor": 0.5,
            "max_halvings": 30,
            "random_restarts": 0,
            "bic_centered_residuals": False,
            "df_counts_intercept": False,
        },
        "path": {
            "grid_size": 30,
            "min_ratio": 1e-3,
        },
        "penalty": {
            "scad_a": 3.7,
        },
        "study": {
            "repetitions": 100,
            "jobs": 1,
            "failure_budget": 0.1,
        },
        "logging": {
            "file": "pmls.log",
            "max_bytes": 10 * 1024 * 1024,
            "backup_count": 3,
        },
    }


def merge_overrides(base: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Recursively merge ``overrides`` into a copy of ``base``; later values win."""
    merged = copy.deepcopy(base)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def get_base_seed(config: Dict[str, Any]) -> int:
    """Return the base seed: MLS_SEED wins over the config ``seed``.

    Raises:
        ConfigError: MLS_SEED or the config seed is not a non-negative integer
    """
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is not None and raw.strip():
        try:
            seed = int(raw.strip())
        except ValueError as e:
            raise ConfigError(f"must be an integer, got {raw!r}", SEED_ENV_VAR) from e
        source = SEED_ENV_VAR
    else:
        seed = config.get("seed", DEFAULT_SEED)
        source = "seed"
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"must be an integer, got {seed!r}", "seed")
    if seed < 0:
        raise ConfigError(f"must be non-negative, got {seed}", source)
    return seed


def load_document(path: str) -> Dict[str, Any]:
    """Read a JSON or YAML mapping from ``path`` (YAML parses both).

    Raises:
        FileNotFoundError: path does not exist
        ConfigError: file is not a parsable mapping
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")
    return _read_mapping(path)


def validate_document(document: Dict[str, Any], schema: Dict[str, Any], label: str) -> None:
    """Validate against a JSON schema, reporting the offending field path.

    Raises:
        ConfigError: e.g. ``study.sample_sizes[1]: -5 is less than the minimum of 2``
    """
    try:
        validate(instance=document, schema=schema)
    except ValidationError as e:
        field_path = label
        for part in e.absolute_path:
            field_path += f"[{part}]" if isinstance(part, int) else f".{part}"
        raise ConfigError(e.message, field_path) from e
