"""
Solver settings.

SolverConfig is immutable; ``with_start`` returns a copy with a different
initialization so that warm-started path points never mutate shared state.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from models.errors import ConfigError

logger = logging.getLogger(__name__)


class Initialization(str, Enum):
    ZEROS = "zeros"
    WARM = "warm"
    PROVIDED = "provided"


@dataclass(frozen=True)
class SolverConfig:
    """Coordinate-descent settings.

    Attributes:
        max_outer_iterations: Maximum number of full sweeps
        coordinate_tolerance: Stop when the largest per-sweep parameter change is below this
        objective_tolerance: ... and the relative objective decrease is below this
        backtrack_factor: Step-halving factor for the descent safeguard
        max_halvings: Maximum step halvings per coordinate update
        initialization: Zeros, Warm (previous path solution) or Provided
        start: Starting parameter vector for Warm/Provided
        random_restarts: Extra uniform[-0.5, 0.5] starts; best objective wins
        restart_seed: Seed for the restart draws
        lambda_min_ratio: lambda_min / lambda_max on a path
        bic_centered_residuals: Use centered residuals in BIC (identical value; sensitivity switch)
        df_counts_intercept: Count the POLS intercept in BIC degrees of freedom
    """

    max_outer_iterations: int = 500
    coordinate_tolerance: float = 1e-7
    objective_tolerance: float = 1e-10
    backtrack_factor: float = 0.5
    max_halvings: int = 30
    initialization: Initialization = Initialization.ZEROS
    start: Optional[Tuple[float, ...]] = None
    random_restarts: int = 0
    restart_seed: int = 0
    lambda_min_ratio: float = 1e-3
    bic_centered_residuals: bool = False
    df_counts_intercept: bool = False

    def __post_init__(self):
        object.__setattr__(self, "initialization", Initialization(self.initialization))
        if self.start is not None:
            object.__setattr__(self, "start", tuple(float(x) for x in np.ravel(self.start)))
        if self.max_outer_iterations < 1:
            raise ConfigError("must be a positive integer", "solver.max_outer_iterations")
        if not self.coordinate_tolerance > 0:
            raise ConfigError("must be > 0", "solver.coordinate_tolerance")
        if not self.objective_tolerance > 0:
            raise ConfigError("must be > 0", "solver.objective_tolerance")
        if not 0 < self.backtrack_factor < 1:
            raise ConfigError("must lie in (0, 1)", "solver.backtrack_factor")
        if self.max_halvings < 0:
            raise ConfigError("must be >= 0", "solver.max_halvings")
        if self.random_restarts < 0:
            raise ConfigError("must be >= 0", "solver.random_restarts")
        if not 0 < self.lambda_min_ratio < 1:
            raise ConfigError("must lie in (0, 1)", "path.min_ratio")
        if self.initialization is not Initialization.ZEROS and self.start is None:
            raise ConfigError(
                f"{self.initialization.value} initialization needs a start vector",
                "solver.initialization",
            )

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None, **overrides) -> "SolverConfig":
        """Build from the ``solver`` and ``path`` sections of a loaded config.

        Keyword overrides win over config values.
        """
        config = config or {}
        solver = dict(config.get("solver") or {})
        path = config.get("path") or {}
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(solver) - known)
        if unknown:
            logger.warning(f"Ignoring unknown solver settings: {', '.join(unknown)}")
        kwargs = {k: v for k, v in solver.items() if k in known}
        if "min_ratio" in path:
            kwargs["lambda_min_ratio"] = float(path["min_ratio"])
        kwargs.update(overrides)
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e), "solver") from e

    def with_start(
        self,
        start: np.ndarray,
        initialization: Initialization = Initialization.WARM,
        random_restarts: Optional[int] = None,
    ) -> "SolverConfig":
        restarts = self.random_restarts if random_restarts is None else random_restarts
        return replace(
            self,
            initialization=initialization,
            start=tuple(float(x) for x in np.ravel(start)),
            random_restarts=restarts,
        )

    def start_vector(self) -> Optional[np.ndarray]:
        return None if self.start is None else np.array(self.start, dtype=float)
