"""Extraction of real-valued delay-Doppler parameters from channel traces.

The complex per-path gain sequence is re-expressed as intensity (dB),
principal-value phase increments, delay, and a Doppler estimate obtained by
phase differencing consecutive snapshots.  Doppler and phase difference are
redundant by construction (nu = dphi / (2 pi dt)); both are kept because
they are forecast in different native units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ddpredict.channel.trace import ChannelTrace
from ddpredict.errors import NumericalError

PARAM_TYPES = ("intensity_db", "phase_diff_rad", "delay_s", "doppler_hz")

# floor applied when a gain is exactly zero; far below any physical fade
ZERO_GAIN_FLOOR_DB = -300.0


def _principal(phi: np.ndarray | float) -> np.ndarray | float:
    """Wrap angles to the principal range (-pi, pi]."""
    wrapped = np.mod(np.asarray(phi) + np.pi, 2.0 * np.pi) - np.pi
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    if np.ndim(phi) == 0:
        return float(wrapped)
    return wrapped


def estimate_doppler(g_t0: complex, g_t1: complex, dt: float) -> float:
    """Doppler frequency from the phase rotation between two snapshots.

    nu = dphi / (2 pi dt) with dphi the principal-value difference, so the
    estimate is confined to the unambiguous band |nu| < 1/(2 dt); faster
    rotations alias back into it.
    """
    if dt <= 0:
        raise ValueError(f"snapshot interval must be positive, got {dt}")
    if g_t0 == 0 or g_t1 == 0:
        raise NumericalError("phase is undefined for a zero gain")
    dphi = _principal(np.angle(g_t1) - np.angle(g_t0))
    return dphi / (2.0 * np.pi * dt)


def continuous_gain(g_t0: complex, nu: float, tau: float, t: float) -> complex:
    """Constant-Doppler gain model g(t) = g_t0 e^{j2pi nu (t - tau)}."""
    return g_t0 * complex(np.exp(2j * np.pi * nu * (t - tau)))


@dataclass(frozen=True)
class DDParamVector:
    """Delay-Doppler parameters of all paths at a single time step."""

    intensity_db: np.ndarray
    phase_diff_rad: np.ndarray
    delay_s: np.ndarray
    doppler_hz: np.ndarray

    def __post_init__(self) -> None:
        n = self.intensity_db.shape
        for name in ("phase_diff_rad", "delay_s", "doppler_hz"):
            if getattr(self, name).shape != n:
                raise ValueError("parameter arrays must share one shape per path")

    @property
    def n_paths(self) -> int:
        return self.intensity_db.size


@dataclass
class DDSeries:
    """Four parameter channels per path on a uniform step grid.

    ``values[p, i, t]`` is parameter type ``PARAM_TYPES[p]`` of path i at
    aligned step t.  Step t corresponds to source snapshot t+1: the first
    snapshot only seeds the phase reference and has no row of its own.
    ``flagged[i, t]`` marks steps where a zero gain forced fallback values.
    """

    values: np.ndarray  # (4, P, T')
    path_ids: np.ndarray  # (P,)
    dt: float
    flagged: np.ndarray = field(default=None)  # (P, T') bool

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or self.values.shape[0] != len(PARAM_TYPES):
            raise ValueError(f"values must be (4, P, T), got {self.values.shape}")
        if self.flagged is None:
            self.flagged = np.zeros(self.values.shape[1:], dtype=bool)

    @property
    def n_paths(self) -> int:
        return self.values.shape[1]

    @property
    def n_steps(self) -> int:
        return self.values.shape[2]

    def channel(self, param_type: str) -> np.ndarray:
        """(P, T') matrix of one parameter type."""
        return self.values[PARAM_TYPES.index(param_type)]

    def at_step(self, t: int) -> DDParamVector:
        return DDParamVector(
            intensity_db=self.values[0, :, t],
            phase_diff_rad=self.values[1, :, t],
            delay_s=self.values[2, :, t],
            doppler_hz=self.values[3, :, t],
        )


def extract_series(trace: ChannelTrace) -> DDSeries:
    """Reduce a complex channel trace to its four real parameter series.

    Zero-gain snapshots get the intensity floor and carry the previous
    phase difference forward (flagged); everything else is the exact polar
    decomposition, so gains are recoverable from intensity plus cumulated
    phase differences and the initial phase.
    """
    if trace.n_snapshots < 2:
        raise ValueError("phase differencing needs at least 2 snapshots")
    gains = trace.gains  # (T, P)
    mags = np.abs(gains)
    t_steps = trace.n_snapshots - 1
    n_paths = gains.shape[1]

    zero = mags == 0.0
    intensity = np.where(
        zero[1:], ZERO_GAIN_FLOOR_DB, 20.0 * np.log10(np.where(zero[1:], 1.0, mags[1:]))
    ).T  # (P, T')

    angles = np.angle(gains)
    raw_dphi = _principal(np.diff(angles, axis=0))  # (T', P)
    pair_zero = zero[1:] | zero[:-1]
    dphi = np.empty_like(raw_dphi)
    prev = np.zeros(n_paths)
    for t in range(t_steps):
        row = np.where(pair_zero[t], prev, raw_dphi[t])
        dphi[t] = row
        prev = row

    delays = trace.delays[1:].T
    doppler = dphi.T / (2.0 * np.pi * trace.dt)

    values = np.stack([intensity, dphi.T, delays, doppler], axis=0)
    return DDSeries(
        values=values,
        path_ids=np.array(trace.path_ids),
        dt=trace.dt,
        flagged=pair_zero.T.copy(),
    )


def reconstruct_path_loss(vec: DDParamVector | np.ndarray) -> float | np.ndarray:
    """Total-power path loss in dB from per-path intensities.

    Combines sub-path powers linearly and negates:
    -10 log10(sum_i 10^{I_i / 10}).
    """
    intensity = vec.intensity_db if isinstance(vec, DDParamVector) else np.asarray(vec)
    if intensity.size == 0:
        raise ValueError("path loss needs at least one path")
    power = np.sum(np.power(10.0, intensity / 10.0), axis=-1)
    out = -10.0 * np.log10(power)
    if np.ndim(out) == 0:
        return float(out)
    return out
