"""
Synthetic point clouds of a curved slope cross-section.

The object-frame curve passes through (2, 16) and (16, 2):

    curve(y) = 0.07 (y - 2)^2 - 1.98 (y - 2) + 16

A camera whose y axis is shifted by ``shift`` sees z = c2 y^2 + c1 y + c0
with c2 = 0.07. The default shift of 9 centres the slice on y in [-7, 7].
Measurements are z = sign * curve(y) * exp(eps) with eps a Gaussian random
field; the surface has no x-dependence. Grid coordinates are in scene units
(cm for the default slice) while the error range is read in field units;
``distance_scale`` converts one into the other (10: cm grid, mm range).
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from config import load_document, validate_document
from models.dataset import Dataset, from_signed_measurements, save_xyz
from models.errors import SignChange
from schema import SCENE_CONFIG_SCHEMA
from spatial.field import CovarianceFamily, CovarianceSpec, simulate_field
from spatial.sampling import SeedLike

logger = logging.getLogger(__name__)

CURVE_SQUARE = 0.07
CURVE_SLOPE = -1.98
CURVE_LEVEL = 16.0
CURVE_ORIGIN = 2.0
DEFAULT_SHIFT = 9.0
DEFAULT_DISTANCE_SCALE = 10.0


def true_curve(y: np.ndarray) -> np.ndarray:
    """Object-frame curve; equals 16 at y = 2 and 2 at y = 16."""
    t = np.asarray(y, dtype=float) - CURVE_ORIGIN
    return CURVE_SQUARE * t * t + CURVE_SLOPE * t + CURVE_LEVEL


def observed_curve_coefficients(shift: float = DEFAULT_SHIFT) -> Tuple[float, float, float]:
    """(c2, c1, c0) of the curve seen from a camera frame y_cam = y_obj - shift."""
    offset = shift - CURVE_ORIGIN
    c2 = CURVE_SQUARE
    c1 = 2.0 * CURVE_SQUARE * offset + CURVE_SLOPE
    c0 = CURVE_SQUARE * offset * offset + CURVE_SLOPE * offset + CURVE_LEVEL
    return c2, c1, c0


def _default_curve() -> Tuple[float, float, float]:
    return observed_curve_coefficients(DEFAULT_SHIFT)


def _default_error() -> CovarianceSpec:
    return CovarianceSpec(CovarianceFamily.GAUSSIAN, range=1.0, nugget=0.2, sd=0.02, mean=0.0, name="Gauss1")


@dataclass(frozen=True)
class SurfaceScene:
    """Curve, sampling grid and multiplicative error of a synthetic scan.

    Attributes:
        curve: (c2, c1, c0) of z = c2 y^2 + c1 y + c0
        x_range: (min, max) across the slice
        y_range: (min, max) along the slope
        nx: grid points along x
        ny: grid points along y
        error: covariance of eps in exp(eps)
        sign: +1 for distances, -1 for depths (negative distance)
        seed: default seed for generate
        distance_scale: field units per grid unit when simulating the error
    """

    curve: Tuple[float, float, float] = field(default_factory=_default_curve)
    x_range: Tuple[float, float] = (-5.0, 5.0)
    y_range: Tuple[float, float] = (-7.0, 7.0)
    nx: int = 22
    ny: int = 31
    error: CovarianceSpec = field(default_factory=_default_error)
    sign: int = 1
    seed: int = 0
    distance_scale: float = DEFAULT_DISTANCE_SCALE

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "SurfaceScene":
        """Validate a scene document and build the scene.

        ``curve.shift`` derives (c2, c1, c0); explicit coefficients win over it.

        Raises:
            ConfigError: document fails schema validation
        """
        validate_document(document, SCENE_CONFIG_SCHEMA, "scene")
        curve_doc = document.get("curve", {})
        c2, c1, c0 = observed_curve_coefficients(float(curve_doc.get("shift", DEFAULT_SHIFT)))
        curve = (
            float(curve_doc.get("c2", c2)),
            float(curve_doc.get("c1", c1)),
            float(curve_doc.get("c0", c0)),
        )
        grid = document.get("grid", {})
        default_error = _default_error()
        error_doc = document.get("error", {})
        error = CovarianceSpec(
            family=error_doc.get("family", default_error.family.value),
            range=float(error_doc.get("range", default_error.range)),
            nugget=float(error_doc.get("nugget", default_error.nugget)),
            sd=float(error_doc.get("sd", default_error.sd)),
            mean=float(error_doc.get("mean", default_error.mean)),
        )
        return cls(
            curve=curve,
            x_range=tuple(float(v) for v in grid.get("x_range", (-5.0, 5.0))),
            y_range=tuple(float(v) for v in grid.get("y_range", (-7.0, 7.0))),
            nx=int(grid.get("nx", 22)),
            ny=int(grid.get("ny", 31)),
            error=error,
            sign=int(document.get("sign", 1)),
            seed=int(document.get("seed", 0)),
            distance_scale=float(error_doc.get("distance_scale", DEFAULT_DISTANCE_SCALE)),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SurfaceScene":
        return cls.from_dict(load_document(path))

    def to_dict(self) -> Dict[str, Any]:
        c2, c1, c0 = self.curve
        return {
            "curve": {"c2": c2, "c1": c1, "c0": c0},
            "grid": {
                "x_range": list(self.x_range),
                "y_range": list(self.y_range),
                "nx": self.nx,
                "ny": self.ny,
            },
            "error": {
                "family": self.error.family.value,
                "range": self.error.range,
                "nugget": self.error.nugget,
                "sd": self.error.sd,
                "mean": self.error.mean,
                "distance_scale": self.distance_scale,
            },
            "sign": self.sign,
            "seed": self.seed,
        }

    def curve_values(self, y: np.ndarray) -> np.ndarray:
        c2, c1, c0 = self.curve
        y = np.asarray(y, dtype=float)
        return c2 * y * y + c1 * y + c0

    def grid_points(self) -> np.ndarray:
        """(nx * ny) x 2 array of (x, y) sampling coordinates."""
        xs = np.linspace(self.x_range[0], self.x_range[1], self.nx)
        ys = np.linspace(self.y_range[0], self.y_range[1], self.ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])


def generate_scene(scene: SurfaceScene, seed: SeedLike) -> Dataset:
    """Raw-scale point cloud z_i = sign * curve(y_i) * exp(eps_i).

    Raises:
        SignChange: the curve crosses zero on the grid
    """
    coords = scene.grid_points()
    curve = scene.curve_values(coords[:, 1])
    if not (np.all(curve > 0) or np.all(curve < 0)):
        raise SignChange(
            f"Scene curve changes sign on the grid (range {curve.min():.4g} .. {curve.max():.4g})"
        )
    eps = simulate_field(scene.error, coords * scene.distance_scale, seed)
    z = scene.sign * curve * np.exp(eps)
    logger.info(f"Generated scene with {len(z)} points, z in [{z.min():.4g}, {z.max():.4g}]")
    return from_signed_measurements(coords, coords, z)


def write_xyz(data: Dataset, path: Union[str, Path]) -> Path:
    """Write a raw-scale cloud as ``x y z`` lines with the sign applied."""
    path = save_xyz(data, path)
    logger.info(f"Wrote {data.n} points to {path}")
    return path
