"""Rician power splits and composite sub-path gains."""

import numpy as np
import pytest

from ddpredict.channel.smallscale import composite_gain, rician_power_split


def test_power_split_k0_half_direct():
    powers = rician_power_split(0.0, 4, los=True)
    assert powers.shape == (5,)
    assert powers[0] == pytest.approx(0.5)
    np.testing.assert_allclose(powers[1:], 0.125)
    assert powers.sum() == pytest.approx(1.0)


def test_power_split_limits():
    hard_los = rician_power_split(np.inf, 3, los=True)
    np.testing.assert_allclose(hard_los, [1.0, 0.0, 0.0, 0.0])
    no_direct = rician_power_split(-np.inf, 2, los=True)
    np.testing.assert_allclose(no_direct, [0.0, 0.5, 0.5])


def test_power_split_monotone_in_k():
    ks = np.linspace(-20.0, 20.0, 9)
    direct = rician_power_split(ks, 4, los=True)[:, 0]
    assert np.all(np.diff(direct) > 0)


def test_power_split_nlos_uniform():
    powers = rician_power_split(12.3, 5, los=False)
    np.testing.assert_allclose(powers, 0.2)


def test_power_split_array_k_shape():
    ks = np.zeros((7,))
    powers = rician_power_split(ks, 3, los=True)
    assert powers.shape == (7, 4)
    np.testing.assert_allclose(powers.sum(axis=-1), 1.0)


def test_power_split_nlos_needs_paths():
    with pytest.raises(ValueError):
        rician_power_split(0.0, 0, los=False)


def test_composite_gain_unit_total_power(rng):
    powers = rng.uniform(0.1, 3.0, 6)
    phases = rng.uniform(0, 2 * np.pi, 6)
    g = composite_gain(powers, phases)
    assert np.sum(np.abs(g) ** 2) == pytest.approx(1.0)


def test_composite_gain_antenna_scaling(rng):
    powers = rng.uniform(0.1, 3.0, 4)
    phases = rng.uniform(0, 2 * np.pi, 4)
    a = 0.5 - 0.25j
    g = composite_gain(powers, phases, antenna_gain=a)
    assert np.sum(np.abs(g) ** 2) == pytest.approx(abs(a) ** 2)


def test_composite_gain_phases_carried(rng):
    phases = np.array([0.0, np.pi / 2])
    g = composite_gain(np.array([1.0, 1.0]), phases)
    np.testing.assert_allclose(np.angle(g), phases)


def test_composite_gain_broadcasts_snapshots(rng):
    powers = rng.uniform(0.1, 1.0, (10, 3))
    phases = rng.uniform(0, 2 * np.pi, (10, 3))
    g = composite_gain(powers, phases)
    assert g.shape == (10, 3)
    np.testing.assert_allclose(np.sum(np.abs(g) ** 2, axis=-1), 1.0)


def test_composite_gain_rejects_bad_powers():
    with pytest.raises(ValueError):
        composite_gain(np.array([-0.1, 1.0]), np.zeros(2))
    with pytest.raises(ValueError):
        composite_gain(np.zeros(3), np.zeros(3))
