"""Per-parameter-type z-score normalization.

Statistics pool all paths and time steps of one parameter type, typically
over the training split only, and are reused verbatim on test data.
Population standard deviation throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddpredict.series.extract import PARAM_TYPES, DDSeries


@dataclass(frozen=True)
class NormStats:
    """Mean/std per parameter type; constant marks std-zero channels."""

    mean: np.ndarray  # (4,)
    std: np.ndarray  # (4,) 1.0 where constant
    constant: np.ndarray  # (4,) bool

    def __post_init__(self) -> None:
        for name in ("mean", "std", "constant"):
            if getattr(self, name).shape != (len(PARAM_TYPES),):
                raise ValueError(f"{name} must have one entry per parameter type")
        if np.any(self.std <= 0):
            raise ValueError("std entries must be positive")

    def as_dict(self) -> dict:
        return {
            "param_types": list(PARAM_TYPES),
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "constant": [bool(v) for v in self.constant],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        if tuple(d["param_types"]) != PARAM_TYPES:
            raise ValueError("parameter type order mismatch")
        return cls(
            mean=np.asarray(d["mean"], dtype=float),
            std=np.asarray(d["std"], dtype=float),
            constant=np.asarray(d["constant"], dtype=bool),
        )


def compute_stats(series: DDSeries | list[DDSeries]) -> NormStats:
    """Pool per-type values over paths, steps, and all given series."""
    many = series if isinstance(series, list) else [series]
    if not many:
        raise ValueError("need at least one series")
    mean = np.empty(len(PARAM_TYPES))
    std = np.empty(len(PARAM_TYPES))
    constant = np.zeros(len(PARAM_TYPES), dtype=bool)
    for p in range(len(PARAM_TYPES)):
        pooled = np.concatenate([s.values[p].reshape(-1) for s in many])
        if pooled.size < 2:
            raise ValueError("z-scoring needs at least 2 time steps")
        mean[p] = pooled.mean()
        sd = pooled.std()  # population
        if sd == 0.0:
            constant[p] = True
            sd = 1.0
        std[p] = sd
    return NormStats(mean=mean, std=std, constant=constant)


def normalize(series: DDSeries, stats: NormStats | None = None) -> tuple[DDSeries, NormStats]:
    """Z-score each parameter type; returns the series and the stats used.

    Pass training-split ``stats`` to transform held-out data consistently.
    """
    if stats is None:
        stats = compute_stats(series)
    values = (series.values - stats.mean[:, None, None]) / stats.std[:, None, None]
    return (
        DDSeries(
            values=values,
            path_ids=series.path_ids,
            dt=series.dt,
            flagged=series.flagged.copy(),
        ),
        stats,
    )


def denormalize(series: DDSeries, stats: NormStats) -> DDSeries:
    """Invert :func:`normalize` exactly."""
    values = series.values * stats.std[:, None, None] + stats.mean[:, None, None]
    return DDSeries(
        values=values,
        path_ids=series.path_ids,
        dt=series.dt,
        flagged=series.flagged.copy(),
    )


def denormalize_values(values: np.ndarray, param_type: str, stats: NormStats) -> np.ndarray:
    """Invert the z-score on raw arrays of a single parameter type."""
    p = PARAM_TYPES.index(param_type)
    return values * stats.std[p] + stats.mean[p]


def normalize_values(values: np.ndarray, param_type: str, stats: NormStats) -> np.ndarray:
    """Apply the z-score of one parameter type to raw arrays."""
    p = PARAM_TYPES.index(param_type)
    return (values - stats.mean[p]) / stats.std[p]
