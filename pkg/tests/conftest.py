"""Shared fixtures: small scenario configs and temp artifact directories."""

import numpy as np
import pytest

from ddpredict.scenario import ScenarioConfig


@pytest.fixture
def small_scenario() -> ScenarioConfig:
    """Short LOS run: 101 snapshots, 3 paths, enough for fast unit tests."""
    config = ScenarioConfig(
        name="unit_los",
        speed_kmh=60.0,
        duration_s=0.05,
        n_paths=3,
        seed=424242,
    )
    config.validate()
    return config


@pytest.fixture
def small_nlos_scenario() -> ScenarioConfig:
    config = ScenarioConfig(
        name="unit_nlos",
        los_mode="NLOS",
        speed_kmh=120.0,
        duration_s=0.05,
        n_paths=3,
        seed=424243,
    )
    config.validate()
    return config


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260825)


def fd_gradcheck(model, contexts, targets, *, loss_kind="mse", eps=1e-5,
                 max_entries=8, seed=3):
    """Central-difference check of every learnable tensor of a forecaster.

    Samples up to ``max_entries`` coordinates per tensor and returns the
    worst relative error observed across all of them.
    """
    rng = np.random.default_rng(seed)
    _, grads = model.loss_and_grads(contexts, targets, loss_kind)
    worst = 0.0
    for name in sorted(model.params):
        tensor = model.params[name]
        flat = tensor.reshape(-1)
        idx = rng.choice(flat.size, size=min(flat.size, max_entries), replace=False)
        for i in idx:
            keep = flat[i]
            flat[i] = keep + eps
            lp, _ = model.loss_and_grads(contexts, targets, loss_kind)
            flat[i] = keep - eps
            lm, _ = model.loss_and_grads(contexts, targets, loss_kind)
            flat[i] = keep
            fd = (lp - lm) / (2.0 * eps)
            an = grads[name].reshape(-1)[i]
            rel = abs(fd - an) / max(1e-8, abs(fd) + abs(an))
            worst = max(worst, rel)
    return worst


@pytest.fixture
def gradcheck():
    return fd_gradcheck
