"""OTFS grid transforms.

Grids are (M, N) complex arrays: axis 0 is delay (subcarrier after the
symplectic transform), axis 1 is Doppler (time slot).  The symplectic pair
is unitary; the pulse-shaping pair uses unnormalized per-slot inverse DFTs
on transmit and matching 1/M-scaled DFTs on receive, so the round trip is
exact and frame energy is M times grid energy.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class OTFSConfig:
    """Frame geometry: M delay bins (subcarriers), N Doppler bins (slots)."""

    m: int = 64
    n: int = 16
    subcarrier_spacing_hz: float = 15e3
    pulse: str = "rectangular"
    fractional_delay: bool = False

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"grid dims must be >= 1, got {self.m}x{self.n}")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier spacing must be positive")
        if self.pulse != "rectangular":
            raise ValueError(f"unsupported pulse shape {self.pulse!r}")

    @property
    def symbol_duration_s(self) -> float:
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def sample_rate_hz(self) -> float:
        return self.m * self.subcarrier_spacing_hz

    @property
    def frame_samples(self) -> int:
        return self.m * self.n

    @property
    def frame_duration_s(self) -> float:
        return self.n * self.symbol_duration_s

    @property
    def delay_resolution_s(self) -> float:
        return 1.0 / self.sample_rate_hz

    @property
    def doppler_resolution_hz(self) -> float:
        return 1.0 / self.frame_duration_s


@dataclass(frozen=True)
class TimeSignal:
    """Cyclic time-domain frame sampled at M*subcarrier_spacing."""

    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))


def _check_grid(grid: np.ndarray, config: OTFSConfig) -> np.ndarray:
    grid = np.asarray(grid, dtype=complex)
    if grid.shape != (config.m, config.n):
        raise ValueError(
            f"grid shape {grid.shape} does not match config {config.m}x{config.n}"
        )
    return grid


def isfft(x_dd: np.ndarray, config: OTFSConfig) -> np.ndarray:
    """Inverse symplectic transform, delay-Doppler to time-frequency.

    X_TF[m, n] = (1/sqrt(MN)) sum_{l,k} X_DD[l, k] e^{j2pi(nk/N - ml/M)},
    i.e. a forward DFT along delay and an inverse DFT along Doppler.
    """
    x_dd = _check_grid(x_dd, config)
    return np.fft.ifft(np.fft.fft(x_dd, axis=0, norm="ortho"), axis=1, norm="ortho")


def sfft(y_tf: np.ndarray, config: OTFSConfig) -> np.ndarray:
    """Symplectic transform, time-frequency to delay-Doppler (inverse of isfft)."""
    y_tf = _check_grid(y_tf, config)
    return np.fft.ifft(np.fft.fft(y_tf, axis=1, norm="ortho"), axis=0, norm="ortho")


def heisenberg(x_tf: np.ndarray, config: OTFSConfig, start_time: float = 0.0) -> TimeSignal:
    """Pulse-shape a time-frequency grid into a time frame.

    With rectangular pulses of one symbol duration, slot n of the frame is
    s[nM + p] = sum_m X_TF[m, n] e^{j2pi m p / M}, an unnormalized inverse
    DFT of the slot's subcarrier column.
    """
    x_tf = _check_grid(x_tf, config)
    slots = config.m * np.fft.ifft(x_tf, axis=0)  # (M, N), sample index along axis 0
    return TimeSignal(samples=slots.T.reshape(-1), start_time=start_time)


def wigner(r: TimeSignal | np.ndarray, config: OTFSConfig) -> np.ndarray:
    """Matched-filter a time frame back onto the time-frequency grid.

    Y_TF[m, n] = (1/M) sum_p r[nM + p] e^{-j2pi m p / M}; exact inverse of
    :func:`heisenberg` for rectangular pulses.
    """
    samples = r.samples if isinstance(r, TimeSignal) else np.asarray(r, dtype=complex)
    if samples.shape != (config.frame_samples,):
        raise ValueError(
            f"signal length {samples.shape} does not match frame {config.frame_samples}"
        )
    slots = samples.reshape(config.n, config.m).T
    return np.fft.fft(slots, axis=0) / config.m


GRID_DIMS_PREFIX = "# dims="


def write_grid(path: str | Path, grid: np.ndarray) -> None:
    """Export a complex grid as delimited text, row-major `re,im` lines."""
    grid = np.asarray(grid, dtype=complex)
    if grid.ndim != 2:
        raise ValueError("grid must be 2-D")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"{GRID_DIMS_PREFIX}{grid.shape[0]},{grid.shape[1]}\n")
        writer = csv.writer(fh)
        for value in grid.reshape(-1):
            writer.writerow([repr(float(value.real)), repr(float(value.imag))])


def read_grid(path: str | Path) -> np.ndarray:
    """Read a grid written by :func:`write_grid`."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith(GRID_DIMS_PREFIX):
            raise ValueError(f"missing dims header in {path}")
        rows, cols = (int(v) for v in first[len(GRID_DIMS_PREFIX):].split(","))
        values = [complex(float(row[0]), float(row[1])) for row in csv.reader(fh)]
    if len(values) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries in {path}, got {len(values)}")
    return np.asarray(values).reshape(rows, cols)
