"""
Surface estimation from point clouds: synthetic scene generation and the
Additive / POLS / PMLS coefficient comparison.
"""

from surface.compare import (
    COMPARISON_COLUMNS,
    ComparisonTable,
    MethodRow,
    column_scales,
    compare_methods,
    design_dataset,
    log_linear_start,
    rescale_to_moment,
    standardized,
)
from surface.scene import (
    DEFAULT_SHIFT,
    SurfaceScene,
    generate_scene,
    observed_curve_coefficients,
    true_curve,
    write_xyz,
)

__all__ = [
    "COMPARISON_COLUMNS",
    "ComparisonTable",
    "MethodRow",
    "column_scales",
    "compare_methods",
    "design_dataset",
    "log_linear_start",
    "rescale_to_moment",
    "standardized",
    "DEFAULT_SHIFT",
    "SurfaceScene",
    "generate_scene",
    "observed_curve_coefficients",
    "true_curve",
    "write_xyz",
]
