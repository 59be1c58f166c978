"""
Penalty functions p_lambda(t), their derivatives q_lambda(t), and the scalar
proximal map used by coordinate descent.

Families:

    none   p(t) = 0
    lasso  p(t) = lambda * t
    scad   lambda * t                                   0 <= t <= lambda
           (2 a lambda t - t^2 - lambda^2) / (2(a-1))   lambda < t <= a lambda
           lambda^2 (a + 1) / 2                         t > a lambda

Kink points take the left-continuous derivative. ``threshold`` never uses the
derivative; it solves the scalar problem

    argmin_u  v (u - z)^2 / 2 + p(|u|)

exactly, branch by branch.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from models.errors import DataError

logger = logging.getLogger(__name__)

DEFAULT_SCAD_A = 3.7


class NegativeArgument(DataError):
    """penalty_value called with t < 0."""


class NonpositiveArgument(DataError):
    """penalty_derivative called with t <= 0."""


class NonpositiveCurvature(DataError):
    """threshold called with curvature v <= 0."""


class PenaltyFamily(str, Enum):
    NONE = "none"
    LASSO = "lasso"
    SCAD = "scad"


@dataclass(frozen=True)
class PenaltySpec:
    """A penalty family with its tuning parameter.

    Attributes:
        family: PenaltyFamily
        lam: Tuning parameter lambda >= 0
        scad_a: SCAD shape parameter (> 2)
    """

    family: PenaltyFamily = PenaltyFamily.NONE
    lam: float = 0.0
    scad_a: float = DEFAULT_SCAD_A

    def __post_init__(self):
        object.__setattr__(self, "family", PenaltyFamily(self.family))
        if not np.isfinite(self.lam) or self.lam < 0:
            raise DataError(f"Penalty lambda must be finite and >= 0, got {self.lam}")
        if not self.scad_a > 2:
            raise DataError(f"SCAD shape parameter must exceed 2, got {self.scad_a}")

    @classmethod
    def from_config(cls, family: str, lam: float = 0.0, config: Optional[dict] = None) -> "PenaltySpec":
        """Build a spec, reading ``penalty.scad_a`` from a loaded config if present."""
        scad_a = ((config or {}).get("penalty") or {}).get("scad_a", DEFAULT_SCAD_A)
        return cls(PenaltyFamily(family), float(lam), float(scad_a))

    @property
    def is_active(self) -> bool:
        return self.family is not PenaltyFamily.NONE and self.lam > 0

    def with_lambda(self, lam: float) -> "PenaltySpec":
        return replace(self, lam=float(lam))


def penalty_value(spec: PenaltySpec, t: float) -> float:
    """Return p_lambda(t) for t >= 0.

    Raises:
        NegativeArgument: t < 0
    """
    if t < 0:
        raise NegativeArgument(f"Penalty argument must be >= 0, got {t}")
    lam, a = spec.lam, spec.scad_a
    if spec.family is PenaltyFamily.NONE:
        return 0.0
    if spec.family is PenaltyFamily.LASSO:
        return lam * t
    if t <= lam:
        return lam * t
    if t <= a * lam:
        return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0))
    return lam * lam * (a + 1.0) / 2.0


def penalty_derivative(spec: PenaltySpec, t: float) -> float:
    """Return q_lambda(t) = dp_lambda/dt for t > 0.

    Raises:
        NonpositiveArgument: t <= 0
    """
    if t <= 0:
        raise NonpositiveArgument(f"Penalty derivative needs t > 0, got {t}")
    lam, a = spec.lam, spec.scad_a
    if spec.family is PenaltyFamily.NONE:
        return 0.0
    if spec.family is PenaltyFamily.LASSO:
        return lam
    if t <= lam:
        return lam
    return max(a * lam - t, 0.0) / (a - 1.0)


def derivative_at_zero(spec: PenaltySpec) -> float:
    """Right limit q_lambda(0+)."""
    return 0.0 if spec.family is PenaltyFamily.NONE else spec.lam


def penalty_sum(spec: PenaltySpec, theta: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    """Vectorized sum of p_lambda(|theta_j|) over coordinates where ``mask`` is True."""
    t = np.abs(np.asarray(theta, dtype=float))
    if mask is not None:
        t = t[np.asarray(mask, dtype=bool)]
    if spec.family is PenaltyFamily.NONE or t.size == 0:
        return 0.0
    lam, a = spec.lam, spec.scad_a
    if spec.family is PenaltyFamily.LASSO:
        return float(lam * t.sum())
    values = np.where(
        t <= lam,
        lam * t,
        np.where(
            t <= a * lam,
            (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0)),
            lam * lam * (a + 1.0) / 2.0,
        ),
    )
    return float(values.sum())


def soft_threshold(z: float, gamma: float) -> float:
    if z > gamma:
        return z - gamma
    if z < -gamma:
        return z + gamma
    return 0.0


def _scalar_objective(spec: PenaltySpec, u: float, z: float, v: float) -> float:
    return 0.5 * v * (u - z) ** 2 + penalty_value(spec, abs(u))


def _scad_candidates(spec: PenaltySpec, magnitude: float, v: float) -> list:
    lam, a = spec.lam, spec.scad_a
    candidates = [0.0]
    # [0, lam]: lasso piece
    candidates.append(min(max(magnitude - lam / v, 0.0), lam))
    # (lam, a lam]: quadratic piece, convex iff v > 1/(a-1)
    curvature = v - 1.0 / (a - 1.0)
    if curvature > 0:
        stationary = (v * magnitude - a * lam / (a - 1.0)) / curvature
        candidates.append(min(max(stationary, lam), a * lam))
    else:
        candidates.extend([lam, a * lam])
    # beyond a lam: no penalty slope
    candidates.append(max(magnitude, a * lam))
    return candidates


def threshold(spec: PenaltySpec, z: float, v: float) -> float:
    """Return argmin_u [ v (u - z)^2 / 2 + p_lambda(|u|) ].

    Raises:
        NonpositiveCurvature: v <= 0
    """
    if not v > 0:
        raise NonpositiveCurvature(f"Threshold curvature must be positive, got {v}")
    z = float(z)
    if spec.family is PenaltyFamily.NONE or spec.lam == 0:
        return z
    if z == 0:
        return 0.0
    lam, a = spec.lam, spec.scad_a

    if spec.family is PenaltyFamily.LASSO:
        return soft_threshold(z, lam / v)

    sign = 1.0 if z > 0 else -1.0
    magnitude = abs(z)
    if (a - 1.0) * v > 1.0:
        if magnitude <= lam * (1.0 + 1.0 / v):
            return soft_threshold(z, lam / v)
        if magnitude <= a * lam:
            scale = (a - 1.0) * v
            return soft_threshold(z, a * lam / scale) / (1.0 - 1.0 / scale)
        return z

    # Nonconvex scalar problem: compare the per-region minimizers
    best = min(
        _scad_candidates(spec, magnitude, v),
        key=lambda u: _scalar_objective(spec, u, magnitude, v),
    )
    return sign * best if best != 0 else 0.0
