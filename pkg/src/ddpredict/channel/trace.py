"""Trace generation: environment sampling and snapshot assembly.

A trace is the full time history of one vehicle pass: per snapshot, the
complex gain and delay of every sub-path, with stable path identities.
Everything is a pure function of (scenario config, lane), so traces are
bit-reproducible and independent lanes can be generated in parallel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ddpredict.channel import geometry
from ddpredict.channel.largescale import (
    combine_endpoint_fields,
    correlated_field,
    cross_correlate,
    ls_mean,
)
from ddpredict.channel.smallscale import composite_gain, rician_power_split
from ddpredict.errors import ConfigError
from ddpredict.scenario import ScenarioConfig


@dataclass(frozen=True)
class Environment:
    """Sampled propagation environment, fixed for a whole trace.

    ``chains[i]`` is the ordered (S_i, 3) scatterer chain of sub-path i
    (S=0 for the direct path); ``cluster_centers``/``cluster_scatterers``
    keep the raw cluster draw for inspection.
    """

    path_ids: np.ndarray  # (P,) stable integer ids
    chains: tuple[np.ndarray, ...]  # per path, (S, 3) scatterer waypoints
    cluster_centers: np.ndarray  # (C, 3)
    cluster_scatterers: tuple[np.ndarray, ...]  # per cluster, (n_s, 3)
    cross_corr: np.ndarray  # 2x2, K-factor vs shadow fading

    @property
    def n_paths(self) -> int:
        return len(self.chains)

    def los_path_index(self) -> int | None:
        for i, chain in enumerate(self.chains):
            if chain.shape[0] == 0:
                return i
        return None


@dataclass(frozen=True)
class ChannelSnapshot:
    """Per-path channel state at one instant."""

    time: float
    path_ids: np.ndarray  # (P,)
    gains: np.ndarray  # (P,) complex linear amplitude
    delays: np.ndarray  # (P,) seconds


@dataclass
class ChannelTrace:
    """Time-ordered channel snapshots on a uniform grid (columnar)."""

    config: ScenarioConfig
    lane: int
    path_ids: np.ndarray  # (P,)
    times: np.ndarray  # (T,)
    gains: np.ndarray  # (T, P) complex
    delays: np.ndarray  # (T, P) seconds

    @property
    def n_snapshots(self) -> int:
        return self.times.size

    @property
    def dt(self) -> float:
        return self.config.snapshot_interval_s

    def snapshot(self, index: int) -> ChannelSnapshot:
        return ChannelSnapshot(
            time=float(self.times[index]),
            path_ids=self.path_ids,
            gains=self.gains[index],
            delays=self.delays[index],
        )


def _env_rng(config: ScenarioConfig) -> np.random.Generator:
    return np.random.default_rng([config.seed, 0])


def _field_rng(config: ScenarioConfig, lane: int) -> np.random.Generator:
    # distinct stream per lane so trajectories sharing a scenario stay
    # statistically independent draws of the same field model
    return np.random.default_rng([config.seed, 1, lane])


def sample_environment(config: ScenarioConfig) -> Environment:
    """Draw scatterer clusters and fix the routing of every sub-path.

    Deterministic for a fixed config seed.  In LOS mode path 0 is the
    direct path (empty chain); every other path routes through the
    scatterers of its own cluster, with extra bounces drawn from the other
    clusters when configured.
    """
    config.validate()
    env_cfg = config.environment
    rng = _env_rng(config)
    los = config.los_mode == "LOS"
    n_scattered = config.n_paths - 1 if los else config.n_paths
    if not los and n_scattered == 0:
        raise ConfigError("NLOS mode needs at least one scattered path")

    n_clusters = max(n_scattered, 1)
    centers = np.column_stack(
        [
            rng.uniform(-config.road_length / 2, config.road_length / 2, n_clusters),
            rng.uniform(-env_cfg.corridor_halfwidth, env_cfg.corridor_halfwidth, n_clusters),
            rng.uniform(0.0, env_cfg.scatterer_height_max, n_clusters),
        ]
    )
    scatterers = []
    for c in range(n_clusters):
        offsets = rng.uniform(
            -env_cfg.cluster_spread, env_cfg.cluster_spread, (env_cfg.scatterers_per_cluster, 3)
        )
        pts = centers[c] + offsets
        pts[:, 2] = np.clip(pts[:, 2], 0.1, None)  # keep scatterers above ground
        scatterers.append(pts)

    chains: list[np.ndarray] = []
    if los:
        chains.append(np.empty((0, 3)))
    for i in range(n_scattered):
        hops = [scatterers[i][rng.integers(0, env_cfg.scatterers_per_cluster)]]
        for _ in range(env_cfg.bounces_per_path - 1):
            c = int(rng.integers(0, n_clusters))
            hops.append(scatterers[c][rng.integers(0, env_cfg.scatterers_per_cluster)])
        chains.append(np.vstack(hops))

    rho = env_cfg.cross_corr
    cross = np.array([[1.0, rho], [rho, 1.0]])
    return Environment(
        path_ids=np.arange(config.n_paths),
        chains=tuple(chains),
        cluster_centers=centers,
        cluster_scatterers=tuple(scatterers),
        cross_corr=cross,
    )


@dataclass(frozen=True)
class LSFields:
    """Large-scale values sampled along one trajectory."""

    times: np.ndarray  # (T,)
    k_db: np.ndarray  # (T,) Rician K-factor
    shadow_db: np.ndarray  # (T,)
    pathloss_db: np.ndarray  # (T,)

    def at(self, t: float) -> tuple[float, float, float]:
        k = float(np.interp(t, self.times, self.k_db))
        s = float(np.interp(t, self.times, self.shadow_db))
        p = float(np.interp(t, self.times, self.pathloss_db))
        return k, s, p


def sample_ls_fields(
    config: ScenarioConfig, env: Environment, lane: int = 0
) -> tuple[LSFields, np.ndarray, np.ndarray]:
    """Sample correlated K-factor/shadow fields along a lane trajectory.

    Returns (fields, times, rx positions).  The two parameter fields are
    drawn at the receiver positions plus the (static) transmitter position,
    cross-correlated, then combined between the endpoints.
    """
    times, rx_pos = geometry.trajectory(config, lane)
    tx = geometry.bs_position(config)
    rng = _field_rng(config, lane)

    raw = np.empty((2, rx_pos.shape[0] + 1))
    all_k = np.vstack([rx_pos, tx[None, :]])
    raw[0] = correlated_field(all_k, config.k_factor, rng)
    # independent draw for shadow fading; correlation is imposed explicitly
    raw[1] = correlated_field(all_k, config.shadow, rng)
    mixed = cross_correlate(raw, env.cross_corr)

    link_dist = np.linalg.norm(rx_pos - tx, axis=1)
    k_x = combine_endpoint_fields(mixed[0, -1], mixed[0, :-1], link_dist, config.k_factor.decorr_distance)
    s_x = combine_endpoint_fields(mixed[1, -1], mixed[1, :-1], link_dist, config.shadow.decorr_distance)

    d_2d = np.linalg.norm(rx_pos[:, :2] - tx[None, :2], axis=1)
    alpha_r = np.arctan2(tx[2] - rx_pos[:, 2], d_2d)
    f_ghz = config.carrier_freq_ghz
    k_mean = ls_mean(config.k_factor, f_ghz, d_2d, config.bs_height, alpha_r)
    s_mean = ls_mean(config.shadow, f_ghz, d_2d, config.bs_height, alpha_r)
    pl = ls_mean(config.pathloss, f_ghz, d_2d, config.bs_height, alpha_r)

    k_db = k_mean + config.k_factor.sigma * k_x
    if config.environment.k_factor_override_db is not None:
        k_db = np.full_like(k_db, config.environment.k_factor_override_db)
    shadow_db = s_mean + config.shadow.sigma * s_x
    fields = LSFields(times=times, k_db=k_db, shadow_db=shadow_db, pathloss_db=pl)
    return fields, times, rx_pos


def _assemble(
    config: ScenarioConfig,
    env: Environment,
    rx_pos: np.ndarray,
    k_db: np.ndarray,
    shadow_db: np.ndarray,
    pathloss_db: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Gains (T, P) and delays (T, P) for receiver positions (T, 3)."""
    tx = geometry.bs_position(config)
    wavelength = geometry.SPEED_OF_LIGHT / config.carrier_freq_hz
    los = config.los_mode == "LOS"

    lengths = np.stack(
        [geometry.path_lengths(chain, tx, rx_pos) for chain in env.chains], axis=-1
    )  # (T, P)
    delays = lengths / geometry.SPEED_OF_LIGHT
    phases = geometry.path_phase(lengths, wavelength)

    n_scattered = env.n_paths - 1 if los else env.n_paths
    powers = rician_power_split(k_db, n_scattered, los)  # (T, P), direct path first
    antenna = complex(
        config.environment.antenna_gain_re, config.environment.antenna_gain_im
    )
    g_small = composite_gain(powers, phases, antenna)

    amp = np.power(10.0, -pathloss_db / 20.0) * np.power(10.0, shadow_db / 20.0)
    gains = amp[..., None] * g_small
    return gains, delays


def snapshot(
    env: Environment, config: ScenarioConfig, ls_fields: LSFields, t: float, lane: int = 0
) -> ChannelSnapshot:
    """Channel state at an arbitrary time within the trace duration."""
    if t < 0 or t > config.duration_s:
        raise ValueError(f"t={t} outside trace duration [0, {config.duration_s}]")
    v = config.speed_ms
    layout = geometry.lane_layout(config)
    y, direction = layout[lane]
    pos = np.array(
        [
            -direction * v * config.duration_s / 2.0 + direction * v * t,
            y,
            config.environment.vehicle_height,
        ]
    )
    k_db, shadow_db, pl_db = ls_fields.at(t)
    gains, delays = _assemble(
        config,
        env,
        pos[None, :],
        np.array([k_db]),
        np.array([shadow_db]),
        np.array([pl_db]),
    )
    return ChannelSnapshot(
        time=t, path_ids=env.path_ids, gains=gains[0], delays=delays[0]
    )


def generate_trace(config: ScenarioConfig, lane: int = 0) -> ChannelTrace:
    """Generate the full channel trace for one lane pass."""
    env = sample_environment(config)
    fields, times, rx_pos = sample_ls_fields(config, env, lane)
    gains, delays = _assemble(
        config, env, rx_pos, fields.k_db, fields.shadow_db, fields.pathloss_db
    )
    return ChannelTrace(
        config=config,
        lane=lane,
        path_ids=env.path_ids,
        times=times,
        gains=gains,
        delays=delays,
    )


TRACE_HEADER = ["time_s", "path_id", "gain_re", "gain_im", "delay_s"]


def write_trace(path: str | Path, trace: ChannelTrace) -> None:
    """Write a trace as delimited text, one row per (snapshot, path)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for ti in range(trace.n_snapshots):
            t = trace.times[ti]
            for pi, pid in enumerate(trace.path_ids):
                g = trace.gains[ti, pi]
                writer.writerow(
                    [
                        repr(float(t)),
                        int(pid),
                        repr(float(g.real)),
                        repr(float(g.imag)),
                        repr(float(trace.delays[ti, pi])),
                    ]
                )


def read_trace(path: str | Path, config: ScenarioConfig | None = None, lane: int = 0) -> ChannelTrace:
    """Read a trace written by :func:`write_trace`.

    The snapshot grid is recovered from the time column; ``config`` is
    optional metadata (its snapshot interval must then match the file).
    """
    path = Path(path)
    times_col, ids_col, re_col, im_col, delay_col = [], [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header!r} in {path}")
        for row in reader:
            times_col.append(float(row[0]))
            ids_col.append(int(row[1]))
            re_col.append(float(row[2]))
            im_col.append(float(row[3]))
            delay_col.append(float(row[4]))
    times = np.asarray(times_col)
    ids = np.asarray(ids_col)
    path_ids = np.unique(ids)
    n_paths = path_ids.size
    if times.size % n_paths != 0:
        raise ValueError(f"trace {path} has incomplete snapshots")
    n_snap = times.size // n_paths
    gains = (np.asarray(re_col) + 1j * np.asarray(im_col)).reshape(n_snap, n_paths)
    delays = np.asarray(delay_col).reshape(n_snap, n_paths)
    snap_times = times.reshape(n_snap, n_paths)[:, 0]
    if n_snap > 1:
        steps = np.diff(snap_times)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-15):
            raise ValueError(f"trace {path} is not on a uniform time grid")
    if config is None:
        dt = float(snap_times[1] - snap_times[0]) if n_snap > 1 else 5e-4
        config = ScenarioConfig(
            snapshot_interval_s=dt,
            duration_s=float(snap_times[-1]),
            n_paths=n_paths,
        )
    return ChannelTrace(
        config=config,
        lane=lane,
        path_ids=path_ids,
        times=snap_times,
        gains=gains,
        delays=delays,
    )
