"""Scenario configuration: dataclasses and TOML file loading.

A scenario file is a small TOML document with one table per concern
(``[scenario]`` geometry/motion, ``[pathloss]`` / ``[k_factor]`` /
``[shadow]`` large-scale coefficient sets, ``[environment]`` scatterer
layout).  Every field is addressable by its dotted ``table.key`` name and
any subset may be overridden; missing keys fall back to the defaults below.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ddpredict.errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class LSCoefficients:
    """Log-distance model for one large-scale parameter.

    ``mean = base + freq_coeff*log10(f_GHz) + dist_coeff*log10(d_2D)
    + height_coeff*log10(h_B) + angle_coeff*alpha`` with, for stochastic
    parameters, a spatially correlated spread of ``sigma`` around that mean
    and decorrelation distance ``decorr_distance`` (meters).
    """

    base: float = 0.0
    freq_coeff: float = 0.0
    dist_coeff: float = 0.0
    height_coeff: float = 0.0
    angle_coeff: float = 0.0
    sigma: float = 0.0
    decorr_distance: float = 20.0

    def validate(self, name: str) -> None:
        if self.sigma < 0:
            raise ConfigError(f"{name}.sigma must be >= 0, got {self.sigma}")
        if self.decorr_distance <= 0:
            raise ConfigError(
                f"{name}.decorr_distance must be > 0, got {self.decorr_distance}"
            )


@dataclass(frozen=True)
class EnvironmentConfig:
    """Scatterer layout and large-scale cross-correlation knobs."""

    cross_corr: float = 0.5  # correlation between K-factor and shadow fading
    corridor_halfwidth: float = 30.0  # scatterer box half-extent across the road, m
    scatterer_height_max: float = 15.0  # m
    scatterers_per_cluster: int = 1
    cluster_spread: float = 5.0  # scatterer offset radius around a cluster center, m
    bounces_per_path: int = 1
    vehicle_height: float = 1.5  # m
    antenna_gain_re: float = 1.0
    antenna_gain_im: float = 0.0
    k_factor_override_db: float | None = None  # e.g. +inf for a pure LOS channel

    def validate(self) -> None:
        if not -1.0 <= self.cross_corr <= 1.0:
            raise ConfigError(f"environment.cross_corr must be in [-1, 1], got {self.cross_corr}")
        if self.scatterers_per_cluster < 1:
            raise ConfigError("environment.scatterers_per_cluster must be >= 1")
        if self.bounces_per_path < 1:
            raise ConfigError("environment.bounces_per_path must be >= 1")
        if self.corridor_halfwidth <= 0 or self.scatterer_height_max <= 0:
            raise ConfigError("environment scatterer box extents must be > 0")


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one vehicular scenario.

    Speeds are km/h on the wire (matching how scenarios are quoted) and
    exposed in m/s via :meth:`speed_ms`.  ``seed`` fixes environment
    sampling and every stochastic field; traces are bit-reproducible given
    (config, seed).
    """

    road_length: float = 500.0  # m
    bs_offset: float = 100.0  # m from road center
    bs_height: float = 25.0  # m
    lane_spacing: float = 5.0  # m
    lanes_per_direction: int = 2
    speed_kmh: float = 60.0
    carrier_freq_hz: float = 3.0e9
    snapshot_interval_s: float = 5.0e-4
    duration_s: float = 1.0
    los_mode: str = "LOS"  # "LOS" or "NLOS"
    n_paths: int = 5
    seed: int = 1234
    name: str = "scenario"

    pathloss: LSCoefficients = field(
        default_factory=lambda: LSCoefficients(base=32.45, freq_coeff=20.0, dist_coeff=20.0)
    )
    k_factor: LSCoefficients = field(
        default_factory=lambda: LSCoefficients(base=9.0, sigma=3.0, decorr_distance=20.0)
    )
    shadow: LSCoefficients = field(
        default_factory=lambda: LSCoefficients(base=0.0, sigma=4.0, decorr_distance=50.0)
    )
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)

    def validate(self) -> None:
        if self.snapshot_interval_s <= 0:
            raise ConfigError("scenario.snapshot_interval_s must be > 0")
        if self.speed_kmh < 0:
            raise ConfigError("scenario.speed_kmh must be >= 0")
        if self.n_paths < 1:
            raise ConfigError("scenario.n_paths must be >= 1")
        if self.road_length <= 0:
            raise ConfigError("scenario.road_length must be > 0")
        if self.duration_s < 0:
            raise ConfigError("scenario.duration_s must be >= 0")
        if self.los_mode not in ("LOS", "NLOS"):
            raise ConfigError(f"scenario.los_mode must be LOS or NLOS, got {self.los_mode!r}")
        if self.carrier_freq_hz <= 0 or self.bs_height <= 0 or self.bs_offset <= 0:
            raise ConfigError("carrier_freq_hz, bs_height and bs_offset must be > 0")
        if self.lanes_per_direction < 1:
            raise ConfigError("scenario.lanes_per_direction must be >= 1")
        travel = self.speed_ms * self.duration_s
        if travel > self.road_length:
            raise ConfigError(
                f"trajectory length {travel:.1f} m exceeds road_length {self.road_length} m"
            )
        self.pathloss.validate("pathloss")
        self.k_factor.validate("k_factor")
        self.shadow.validate("shadow")
        self.environment.validate()

    @property
    def speed_ms(self) -> float:
        return self.speed_kmh / 3.6

    @property
    def n_lanes(self) -> int:
        return 2 * self.lanes_per_direction

    @property
    def n_snapshots(self) -> int:
        return int(round(self.duration_s / self.snapshot_interval_s)) + 1

    @property
    def carrier_freq_ghz(self) -> float:
        return self.carrier_freq_hz / 1e9

    def replace(self, **kwargs) -> "ScenarioConfig":
        return dataclasses.replace(self, **kwargs)


_SECTION_TYPES = {
    "pathloss": LSCoefficients,
    "k_factor": LSCoefficients,
    "shadow": LSCoefficients,
    "environment": EnvironmentConfig,
}


def _build_section(cls, table: dict, section: str):
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key not in known:
            raise ConfigError(f"unknown key {section}.{key}")
        kwargs[key] = value
    return cls(**kwargs)


def scenario_from_dict(data: dict, name: str = "scenario") -> ScenarioConfig:
    """Build a validated ScenarioConfig from nested dicts (parsed TOML)."""
    scalar_fields = {
        f.name for f in dataclasses.fields(ScenarioConfig) if f.name not in _SECTION_TYPES
    }
    kwargs: dict = {"name": name}
    scenario_table = data.get("scenario", {})
    for key, value in scenario_table.items():
        if key not in scalar_fields:
            raise ConfigError(f"unknown key scenario.{key}")
        kwargs[key] = value
    for section, cls in _SECTION_TYPES.items():
        if section in data:
            kwargs[section] = _build_section(cls, data[section], section)
    unknown = set(data) - {"scenario"} - set(_SECTION_TYPES)
    if unknown:
        raise ConfigError(f"unknown scenario tables: {sorted(unknown)}")
    config = ScenarioConfig(**kwargs)
    config.validate()
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario TOML file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"scenario file {path} is not valid TOML: {exc}") from exc
    return scenario_from_dict(data, name=path.stem)


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. ``los_60``)."""
    ref = resources.files("ddpredict.scenarios").joinpath(f"{name}.toml")
    with resources.as_file(ref) as concrete:
        if not concrete.exists():
            raise ConfigError(f"no bundled scenario named {name!r}")
        return concrete


BUNDLED_SCENARIOS = ("los_60", "los_120", "nlos_60", "nlos_120")
