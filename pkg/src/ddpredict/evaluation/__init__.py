"""Forecast scoring and report assembly.

Weighted MAE in native units, empirical error CDFs, horizon comparisons,
and path-loss reconstruction overlays, collected into exportable tables.
"""

from ddpredict.evaluation.metrics import (
    error_cdf,
    horizon_eval,
    path_loss_eval,
    weighted_mae,
)
from ddpredict.evaluation.report import (
    EvalReport,
    write_cdf_csv,
    write_horizon_csv,
    write_loss_curve_csv,
    write_overlay_csv,
    write_report_csv,
)

__all__ = [
    "EvalReport",
    "error_cdf",
    "horizon_eval",
    "path_loss_eval",
    "weighted_mae",
    "write_cdf_csv",
    "write_horizon_csv",
    "write_loss_curve_csv",
    "write_overlay_csv",
    "write_report_csv",
]
