"""
Fit and path results, and their JSON form.

Floats are written with 17 significant digits so that a result file
reproduces the in-memory doubles exactly. Non-finite values become null.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from jsonschema import ValidationError, validate

from models.errors import DataError
from schema import FIT_PAYLOAD_SCHEMA, PATH_PAYLOAD_SCHEMA

logger = logging.getLogger(__name__)

_FLOAT_MARKER = "\u0000f:"
_FLOAT_PATTERN = re.compile(r'"\\u0000f:([^"]*)"')


@dataclass(frozen=True)
class FitResult:
    """Outcome of one coordinate-descent run.

    ``params`` is the full parameter vector (b0 first for POLS); ``theta`` the
    mean-function parameters. ``active_set`` holds the theta indices with
    exactly nonzero estimates.
    """

    params: np.ndarray
    theta: np.ndarray
    intercept: Optional[float]
    active_set: Tuple[int, ...]
    objective: float
    smooth_part: float
    iterations: int
    converged: bool
    bic: Optional[float]
    lambda_: float
    method: str
    penalty: str
    history: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("params", "theta"):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "penalty": self.penalty,
            "lambda": float(self.lambda_),
            "theta_hat": [float(x) for x in self.theta],
            "intercept": self.intercept,
            "active_set": list(self.active_set),
            "objective": float(self.objective),
            "smooth_part": float(self.smooth_part),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "bic": self.bic,
            "history": [float(x) for x in self.history],
        }


@dataclass(frozen=True)
class PathResult:
    """Fits over a decreasing lambda grid with BIC selection."""

    lambdas: Tuple[float, ...]
    fits: Tuple[FitResult, ...]
    bic_values: Tuple[Optional[float], ...]
    selected_index: int

    @property
    def selected(self) -> FitResult:
        return self.fits[self.selected_index]

    @property
    def selected_lambda(self) -> float:
        return self.lambdas[self.selected_index]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambdas": [float(x) for x in self.lambdas],
            "bic_values": list(self.bic_values),
            "selected_index": int(self.selected_index),
            "selected_lambda": float(self.selected_lambda),
            "fits": [f.to_dict() for f in self.fits],
        }


def _mark_floats(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _mark_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_mark_floats(v) for v in value]
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return None
        return f"{_FLOAT_MARKER}{float(value):.17g}"
    return value


def _null_non_finite(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _null_non_finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_null_non_finite(v) for v in value]
    if isinstance(value, (float, np.floating)) and not np.isfinite(value):
        return None
    return value


def to_json_text(payload: Dict[str, Any]) -> str:
    """Serialize with floats at 17 significant digits and non-finite values as null."""
    text = json.dumps(_mark_floats(payload), indent=2)
    return _FLOAT_PATTERN.sub(lambda m: m.group(1), text)


def write_result(
    result: Union[FitResult, PathResult],
    path: Union[str, Path],
) -> Path:
    """Validate a result payload against its schema and write it as JSON.

    Raises:
        DataError: payload does not match its schema
    """
    path = Path(path)
    payload = _null_non_finite(result.to_dict())
    schema = PATH_PAYLOAD_SCHEMA if isinstance(result, PathResult) else FIT_PAYLOAD_SCHEMA
    try:
        validate(instance=payload, schema=schema)
    except ValidationError as e:
        field_path = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise DataError(f"Result payload invalid at {field_path}: {e.message}") from e
    path.write_text(to_json_text(payload) + "\n")
    logger.info(f"Wrote {type(result).__name__} to {path}")
    return path


def summary_lines(result: Union[FitResult, PathResult]) -> List[str]:
    """Human-readable summary for summary.txt."""
    lines = []
    if isinstance(result, PathResult):
        lines.append(f"path points: {len(result.lambdas)}")
        lines.append(f"selected lambda: {result.selected_lambda:.6g} (index {result.selected_index})")
        fit = result.selected
    else:
        fit = result
    lines.append(f"method: {fit.method}  penalty: {fit.penalty}  lambda: {fit.lambda_:.6g}")
    if fit.intercept is not None:
        lines.append(f"intercept: {fit.intercept:.6g}")
    lines.append("theta_hat: " + " ".join(f"{x:.6g}" for x in fit.theta))
    lines.append(f"active set: {list(fit.active_set)}")
    lines.append(f"objective: {fit.objective:.10g}  smooth part: {fit.smooth_part:.10g}")
    bic = "degenerate" if fit.bic is None else f"{fit.bic:.6g}"
    lines.append(f"bic: {bic}")
    lines.append(f"iterations: {fit.iterations}  converged: {fit.converged}")
    return lines
