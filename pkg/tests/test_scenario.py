"""Scenario config loading and validation."""

import dataclasses

import pytest

from ddpredict.errors import ConfigError
from ddpredict.scenario import (
    BUNDLED_SCENARIOS,
    ScenarioConfig,
    bundled_scenario_path,
    load_scenario,
    scenario_from_dict,
)


def test_bundled_scenarios_load_and_validate():
    for name in BUNDLED_SCENARIOS:
        config = load_scenario(bundled_scenario_path(name))
        assert config.name == name
        assert config.snapshot_interval_s == 5e-4
        assert config.n_snapshots == 2001
        assert config.n_lanes == 6
        kind, speed = name.rsplit("_", 1)
        assert config.los_mode == kind.upper()
        assert config.speed_kmh == float(speed)


def test_bundled_scenarios_have_distinct_seeds():
    seeds = {load_scenario(bundled_scenario_path(n)).seed for n in BUNDLED_SCENARIOS}
    assert len(seeds) == len(BUNDLED_SCENARIOS)


def test_snapshot_count_formula():
    config = ScenarioConfig(duration_s=0.1)
    assert config.n_snapshots == 201


def test_speed_conversion():
    assert ScenarioConfig(speed_kmh=36.0).speed_ms == pytest.approx(10.0)


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_scenario(tmp_path / "nope.toml")


def test_invalid_toml_is_config_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[scenario\nspeed_kmh = 60\n")
    with pytest.raises(ConfigError, match="not valid TOML"):
        load_scenario(bad)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key scenario.warp"):
        scenario_from_dict({"scenario": {"warp": 9}})


def test_unknown_table_rejected():
    with pytest.raises(ConfigError, match="unknown scenario tables"):
        scenario_from_dict({"propulsion": {"x": 1}})


def test_validation_rejects_bad_values():
    for kwargs, pattern in [
        ({"speed_kmh": -1.0}, "speed_kmh"),
        ({"n_paths": 0}, "n_paths"),
        ({"snapshot_interval_s": 0.0}, "snapshot_interval_s"),
        ({"los_mode": "MAYBE"}, "los_mode"),
        ({"duration_s": 100.0, "speed_kmh": 120.0}, "road_length"),
    ]:
        with pytest.raises(ConfigError, match=pattern):
            ScenarioConfig(**kwargs).validate()


def test_zero_speed_allowed():
    # a parked vehicle is a legal (if dull) scenario
    ScenarioConfig(speed_kmh=0.0).validate()


def test_replace_returns_modified_copy():
    base = ScenarioConfig()
    other = base.replace(seed=99, duration_s=0.2)
    assert other.seed == 99 and other.duration_s == 0.2
    assert base.seed != 99
    assert dataclasses.asdict(base)["speed_kmh"] == dataclasses.asdict(other)["speed_kmh"]


def test_toml_overrides_nested_sections(tmp_path):
    f = tmp_path / "custom.toml"
    f.write_text(
        "[scenario]\nspeed_kmh = 30.0\nduration_s = 0.1\n"
        "[shadow]\nsigma = 7.5\n"
        "[environment]\ncross_corr = 0.25\n"
    )
    config = load_scenario(f)
    assert config.speed_kmh == 30.0
    assert config.shadow.sigma == 7.5
    assert config.environment.cross_corr == 0.25
    # untouched sections keep their defaults
    assert config.k_factor.base == 9.0


def test_bundled_path_unknown_name():
    with pytest.raises(ConfigError, match="no bundled scenario"):
        bundled_scenario_path("mars_500")
