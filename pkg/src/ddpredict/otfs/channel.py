"""Multipath channel application for cyclic OTFS frames.

Each sub-path contributes g_i e^{j2pi nu_i (t - tau_i)} s(t - tau_i); the
frame is treated as cyclic, so a delay is a circular shift.  The same
channel is exposed in three views: per-sample in time, as a sparse set of
delay-Doppler taps, and as a time-frequency response.
"""

from __future__ import annotations

import numpy as np

from ddpredict.channel.trace import ChannelSnapshot
from ddpredict.otfs.transforms import OTFSConfig, TimeSignal


def quantize_delay(tau: float, config: OTFSConfig) -> tuple[int, float, float]:
    """Snap a delay to the sample grid.

    Returns (sample shift, snapped delay in seconds, absolute error in
    seconds).  The shift is reduced modulo the frame length.
    """
    if tau < 0:
        raise ValueError(f"delay must be non-negative, got {tau}")
    shift = int(round(tau * config.sample_rate_hz))
    tau_hat = shift / config.sample_rate_hz
    return shift % config.frame_samples, tau_hat, abs(tau - tau_hat)


def _delayed(samples: np.ndarray, tau: float, config: OTFSConfig) -> tuple[np.ndarray, float]:
    """Cyclically delayed copy of the frame and the delay actually applied."""
    if config.fractional_delay:
        pos = tau * config.sample_rate_hz
        base = int(np.floor(pos))
        frac = pos - base
        lo = np.roll(samples, base % config.frame_samples)
        if frac == 0.0:
            return lo, tau
        hi = np.roll(samples, (base + 1) % config.frame_samples)
        return (1.0 - frac) * lo + frac * hi, tau
    shift, tau_hat, _ = quantize_delay(tau, config)
    return np.roll(samples, shift), tau_hat


def apply_channel_time(
    s: TimeSignal | np.ndarray,
    snapshot: ChannelSnapshot,
    dopplers: np.ndarray,
    config: OTFSConfig,
) -> TimeSignal:
    """Propagate a frame through a multipath snapshot, sample by sample.

    r[q] = sum_i g_i e^{j2pi nu_i (t_q - tau_i)} s[q - l_i] with t_q
    measured from the frame start and l_i the (quantized) delay in samples.
    """
    if isinstance(s, TimeSignal):
        samples, start = s.samples, s.start_time
    else:
        samples, start = np.asarray(s, dtype=complex), 0.0
    if samples.shape != (config.frame_samples,):
        raise ValueError(
            f"signal length {samples.shape} does not match frame {config.frame_samples}"
        )
    dopplers = np.asarray(dopplers, dtype=float)
    if dopplers.shape != snapshot.gains.shape:
        raise ValueError("need one Doppler per path")
    frame_t = config.frame_duration_s
    if np.any(snapshot.delays >= frame_t):
        raise ValueError("path delay exceeds frame duration")

    t = np.arange(config.frame_samples) / config.sample_rate_hz
    out = np.zeros(config.frame_samples, dtype=complex)
    for gain, tau, nu in zip(snapshot.gains, snapshot.delays, dopplers):
        shifted, tau_used = _delayed(samples, float(tau), config)
        out += gain * np.exp(2j * np.pi * nu * (t - tau_used)) * shifted
    return TimeSignal(samples=out, start_time=start)


def dd_response(
    snapshot: ChannelSnapshot, dopplers: np.ndarray
) -> list[tuple[float, float, complex]]:
    """Sparse delay-Doppler taps (tau_i, nu_i, g_i e^{-j2pi nu_i tau_i}).

    One tap per sub-path; the phase factor accounts for the Doppler
    rotation accrued over the path's own delay.
    """
    dopplers = np.asarray(dopplers, dtype=float)
    if dopplers.shape != snapshot.gains.shape:
        raise ValueError("need one Doppler per path")
    taps = []
    for gain, tau, nu in zip(snapshot.gains, snapshot.delays, dopplers):
        coeff = complex(gain) * np.exp(-2j * np.pi * nu * tau)
        taps.append((float(tau), float(nu), complex(coeff)))
    return taps


def tf_response(
    snapshot: ChannelSnapshot,
    dopplers: np.ndarray,
    f: float | np.ndarray,
    t: float | np.ndarray,
) -> complex | np.ndarray:
    """Time-frequency channel response H(f, t).

    H(f, t) = sum_i g_i e^{-j2pi nu_i tau_i} e^{-j2pi (f tau_i - nu_i t)}.
    Broadcasts over array-valued f and t.
    """
    dopplers = np.asarray(dopplers, dtype=float)
    if dopplers.shape != snapshot.gains.shape:
        raise ValueError("need one Doppler per path")
    f = np.asarray(f, dtype=float)
    t = np.asarray(t, dtype=float)
    acc = np.zeros(np.broadcast_shapes(f.shape, t.shape), dtype=complex)
    for gain, tau, nu in zip(snapshot.gains, snapshot.delays, dopplers):
        acc = acc + gain * np.exp(-2j * np.pi * nu * tau) * np.exp(
            -2j * np.pi * (f * tau - nu * t)
        )
    if acc.ndim == 0:
        return complex(acc)
    return acc
