"""Delay-Doppler vehicular channel workbench.

Pipeline: synthesize quasi-deterministic vehicular channel traces, map them
through OTFS to the delay-Doppler domain, extract per-path parameter time
series (intensity, phase difference, delay, Doppler), and forecast those
series with a from-scratch decoder-only transformer plus classical
baselines.  The ``ddpredict`` CLI chains the stages into reproducible
experiments.
"""

from ddpredict.errors import (
    ConfigError,
    DDPredictError,
    MissingArtifactError,
    NumericalError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DDPredictError",
    "MissingArtifactError",
    "NumericalError",
    "__version__",
]
