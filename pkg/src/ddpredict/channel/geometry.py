"""Road/vehicle geometry and per-path propagation lengths.

Coordinates: x runs along the road, y across it (road center at y=0, base
station on the positive-y side), z is height.  All distances in meters.
"""

from __future__ import annotations

import numpy as np

from ddpredict.scenario import ScenarioConfig

SPEED_OF_LIGHT = 299792458.0  # m/s


def bs_position(config: ScenarioConfig) -> np.ndarray:
    """Base station antenna position (single antenna, static)."""
    return np.array([0.0, config.bs_offset, config.bs_height])


def lane_layout(config: ScenarioConfig) -> list[tuple[float, int]]:
    """(y offset, travel direction) per lane.

    Lanes 0..L-1 run in +x on the base-station side of the road, lanes
    L..2L-1 run in -x on the far side; side-by-side pairs are (0,1), (2,3)
    and so on.
    """
    lanes = []
    for k in range(config.lanes_per_direction):
        lanes.append((config.lane_spacing * (k + 0.5), +1))
    for k in range(config.lanes_per_direction):
        lanes.append((-config.lane_spacing * (k + 0.5), -1))
    return lanes


def trajectory(config: ScenarioConfig, lane: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sampled vehicle positions for one lane.

    The pass is centered on x=0 so the vehicle crosses the point of closest
    approach to the base station mid-trace.  Returns (times (T,), positions
    (T, 3)).
    """
    layout = lane_layout(config)
    if not 0 <= lane < len(layout):
        raise ValueError(f"lane must be in [0, {len(layout)}), got {lane}")
    y, direction = layout[lane]
    times = np.arange(config.n_snapshots) * config.snapshot_interval_s
    v = config.speed_ms
    x0 = -direction * v * config.duration_s / 2.0
    positions = np.empty((times.size, 3))
    positions[:, 0] = x0 + direction * v * times
    positions[:, 1] = y
    positions[:, 2] = config.environment.vehicle_height
    return times, positions


def path_lengths(
    chain: np.ndarray, tx_pos: np.ndarray, rx_pos: np.ndarray
) -> np.ndarray:
    """Total propagation length tx -> scatterer chain -> rx.

    ``chain`` is (S, 3) with S >= 0 (S=0 is the direct path); ``rx_pos`` may
    be a single point (3,) or a stack (T, 3).  Only the final segment
    depends on the receiver, so the static prefix is summed once.
    """
    tx_pos = np.asarray(tx_pos, dtype=float)
    rx_pos = np.asarray(rx_pos, dtype=float)
    chain = np.asarray(chain, dtype=float).reshape(-1, 3)
    waypoints = np.vstack([tx_pos[None, :], chain])
    static = float(np.sum(np.linalg.norm(np.diff(waypoints, axis=0), axis=1)))
    last = waypoints[-1]
    final = np.linalg.norm(rx_pos - last, axis=-1)
    return static + final


def path_delay(chain: np.ndarray, tx_pos: np.ndarray, rx_pos: np.ndarray) -> np.ndarray:
    """Propagation delay in seconds along tx -> scatterers -> rx."""
    return path_lengths(chain, tx_pos, rx_pos) / SPEED_OF_LIGHT


def path_phase(distance, wavelength: float):
    """Geometric carrier phase 2*pi*d/lambda wrapped to [0, 2*pi)."""
    if wavelength <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    return np.mod(2.0 * np.pi * np.asarray(distance, dtype=float) / wavelength, 2.0 * np.pi)
