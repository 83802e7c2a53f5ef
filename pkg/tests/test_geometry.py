"""Road geometry, trajectories, and propagation path lengths."""

import numpy as np
import pytest

from ddpredict.channel.geometry import (
    SPEED_OF_LIGHT,
    bs_position,
    lane_layout,
    path_delay,
    path_lengths,
    path_phase,
    trajectory,
)
from ddpredict.scenario import ScenarioConfig


def test_bs_position_matches_config(small_scenario):
    pos = bs_position(small_scenario)
    assert pos.tolist() == [0.0, small_scenario.bs_offset, small_scenario.bs_height]


def test_lane_layout_offsets_and_directions():
    config = ScenarioConfig(lane_spacing=5.0, lanes_per_direction=2)
    layout = lane_layout(config)
    assert layout == [(2.5, 1), (7.5, 1), (-2.5, -1), (-7.5, -1)]


def test_trajectory_grid_and_speed(small_scenario):
    times, pos = trajectory(small_scenario, lane=0)
    assert times.shape == (small_scenario.n_snapshots,)
    assert pos.shape == (small_scenario.n_snapshots, 3)
    np.testing.assert_allclose(np.diff(times), small_scenario.snapshot_interval_s)
    speeds = np.linalg.norm(np.diff(pos, axis=0), axis=1) / np.diff(times)
    np.testing.assert_allclose(speeds, small_scenario.speed_ms, rtol=1e-9)


def test_trajectory_centered_on_closest_approach(small_scenario):
    times, pos = trajectory(small_scenario, lane=0)
    mid = pos[:, 0][small_scenario.n_snapshots // 2]
    assert abs(mid) < small_scenario.speed_ms * small_scenario.snapshot_interval_s


def test_opposite_lanes_move_opposite_ways(small_scenario):
    _, fwd = trajectory(small_scenario, lane=0)
    _, rev = trajectory(small_scenario, lane=2)
    assert fwd[-1, 0] > fwd[0, 0]
    assert rev[-1, 0] < rev[0, 0]
    assert fwd[0, 1] == -rev[0, 1]


def test_trajectory_rejects_bad_lane(small_scenario):
    with pytest.raises(ValueError, match="lane"):
        trajectory(small_scenario, lane=4)


def test_path_lengths_direct_is_euclidean(rng):
    tx = rng.uniform(-10, 10, 3)
    rx = rng.uniform(-10, 10, 3)
    direct = path_lengths(np.empty((0, 3)), tx, rx)
    assert direct == pytest.approx(np.linalg.norm(rx - tx))


def test_path_lengths_matches_bruteforce_sum(rng):
    for _ in range(20):
        n_hops = int(rng.integers(1, 4))
        tx = rng.uniform(-50, 50, 3)
        chain = rng.uniform(-50, 50, (n_hops, 3))
        rx = rng.uniform(-50, 50, (7, 3))
        got = path_lengths(chain, tx, rx)
        pts = np.vstack([tx[None], chain])
        for k in range(rx.shape[0]):
            full = np.vstack([pts, rx[k][None]])
            want = sum(
                np.linalg.norm(full[i + 1] - full[i]) for i in range(full.shape[0] - 1)
            )
            assert got[k] == pytest.approx(want, rel=1e-12)


def test_path_lengths_triangle_inequality(rng):
    tx = np.zeros(3)
    rx = np.array([100.0, 0.0, 0.0])
    bounce = rng.uniform(-30, 30, (1, 3))
    assert path_lengths(bounce, tx, rx) >= np.linalg.norm(rx - tx)


def test_path_delay_is_length_over_c():
    tx = np.zeros(3)
    rx = np.array([SPEED_OF_LIGHT * 1e-6, 0.0, 0.0])
    assert path_delay(np.empty((0, 3)), tx, rx) == pytest.approx(1e-6)


def test_path_phase_wraps():
    lam = 0.1
    assert path_phase(0.0, lam) == 0.0
    assert path_phase(lam, lam) == pytest.approx(0.0, abs=1e-12)
    assert path_phase(0.25 * lam, lam) == pytest.approx(np.pi / 2)
    vals = path_phase(np.linspace(0, 17.3, 100) * lam, lam)
    assert np.all((vals >= 0.0) & (vals < 2 * np.pi))


def test_path_phase_rejects_bad_wavelength():
    with pytest.raises(ValueError):
        path_phase(1.0, 0.0)
