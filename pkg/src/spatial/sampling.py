"""
Stochastic sampling design with an increasing domain.

Locations are s_i = eta_n * u_i with u_i i.i.d. on the unit square and
eta_n = n^(1/d), so the sampling region grows while point density stays
bounded.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from models.errors import DataError

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator]


class Density(str, Enum):
    UNIFORM = "uniform"


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Accept an integer seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class SamplingDesign:
    """Prototype region [0,1]^d, a density on it, and the n^(1/d) scaling."""

    d: int = 2
    density: Density = Density.UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "density", Density(self.density))
        if self.d < 1:
            raise DataError(f"Spatial dimension must be positive, got {self.d}")

    def eta(self, n: int) -> float:
        return float(n) ** (1.0 / self.d)


def sample_locations(design: SamplingDesign, n: int, seed: SeedLike) -> np.ndarray:
    """Draw n locations in [0, eta_n]^d.

    Raises:
        DataError: n < 1
    """
    if n < 1:
        raise DataError(f"Need at least one location, got n={n}")
    rng = as_generator(seed)
    u = rng.uniform(0.0, 1.0, size=(n, design.d))
    return design.eta(n) * u
