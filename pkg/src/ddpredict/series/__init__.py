"""Delay-Doppler parameter series: extraction, normalization, windowing.

A channel trace is reduced to four real-valued series per path (intensity
in dB, snapshot-to-snapshot phase difference in radians, delay in seconds,
Doppler in Hz), z-scored per parameter type, and cut into fixed-length
context/target windows for forecasting.
"""

from ddpredict.series.extract import (
    PARAM_TYPES,
    DDParamVector,
    DDSeries,
    continuous_gain,
    estimate_doppler,
    extract_series,
    reconstruct_path_loss,
)
from ddpredict.series.normalize import (
    NormStats,
    compute_stats,
    denormalize,
    normalize,
)
from ddpredict.series.windowing import (
    WindowedDataset,
    read_series,
    read_windows,
    window,
    write_series,
    write_windows,
)

__all__ = [
    "PARAM_TYPES",
    "DDParamVector",
    "DDSeries",
    "NormStats",
    "WindowedDataset",
    "compute_stats",
    "continuous_gain",
    "denormalize",
    "estimate_doppler",
    "extract_series",
    "normalize",
    "read_series",
    "read_windows",
    "reconstruct_path_loss",
    "window",
    "write_series",
    "write_windows",
]
