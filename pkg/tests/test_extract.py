"""Delay-Doppler parameter extraction from channel traces."""

import numpy as np
import pytest

from ddpredict.channel.trace import ChannelTrace, generate_trace
from ddpredict.errors import NumericalError
from ddpredict.series.extract import (
    PARAM_TYPES,
    ZERO_GAIN_FLOOR_DB,
    DDParamVector,
    DDSeries,
    _principal,
    continuous_gain,
    estimate_doppler,
    extract_series,
    reconstruct_path_loss,
)


def _make_trace(config, gains, delays=None):
    gains = np.asarray(gains, dtype=complex)
    t, p = gains.shape
    if delays is None:
        delays = np.full((t, p), 1e-6)
    return ChannelTrace(
        config=config,
        lane=0,
        path_ids=np.arange(p),
        times=np.arange(t) * config.snapshot_interval_s,
        gains=gains,
        delays=np.asarray(delays, dtype=float),
    )


# ---------------------------------------------------------------- doppler


def test_doppler_exact_within_unambiguous_band():
    # 0.5 ms sampling: any |nu| < 1 kHz is recovered from one phase step
    dt = 5e-4
    g0 = 0.3 - 0.8j
    for nu in (0.0, 100.0, 500.0, 999.0, -100.0, -500.0, -999.0):
        g1 = g0 * np.exp(2j * np.pi * nu * dt)
        est = estimate_doppler(g0, g1, dt)
        assert est == pytest.approx(nu, rel=1e-9, abs=1e-9)


def test_doppler_aliases_to_principal_band():
    dt = 5e-4
    g0 = 1.0 + 0j
    # 1.5 kHz rotation is indistinguishable from -0.5 kHz
    g1 = g0 * np.exp(2j * np.pi * 1500.0 * dt)
    assert estimate_doppler(g0, g1, dt) == pytest.approx(-500.0, rel=1e-9)
    # band edge: a half-turn maps to +1/(2 dt), never the negative edge
    g1 = g0 * np.exp(2j * np.pi * 1000.0 * dt)
    assert estimate_doppler(g0, g1, dt) == pytest.approx(1000.0, rel=1e-9)
    g1 = g0 * np.exp(-2j * np.pi * 1000.0 * dt)
    assert estimate_doppler(g0, g1, dt) == pytest.approx(1000.0, rel=1e-9)


def test_doppler_rejects_bad_inputs():
    with pytest.raises(ValueError):
        estimate_doppler(1 + 0j, 1j, 0.0)
    with pytest.raises(NumericalError):
        estimate_doppler(0j, 1j, 5e-4)
    with pytest.raises(NumericalError):
        estimate_doppler(1j, 0j, 5e-4)


def test_continuous_gain_round_trip():
    g0 = 0.7 + 0.2j
    nu, tau, dt = 340.0, 2e-6, 5e-4
    g1 = continuous_gain(g0, nu, tau, tau + dt)
    assert estimate_doppler(g0, g1, dt) == pytest.approx(nu, rel=1e-9)
    assert continuous_gain(g0, nu, tau, tau) == pytest.approx(g0)


def test_principal_range():
    assert _principal(np.pi) == pytest.approx(np.pi)
    assert _principal(-np.pi) == pytest.approx(np.pi)
    assert _principal(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert _principal(0.0) == 0.0
    arr = _principal(np.array([2 * np.pi, -2 * np.pi]))
    np.testing.assert_allclose(arr, 0.0, atol=1e-12)


# ---------------------------------------------------------------- extraction


def test_extract_series_polar_decomposition(small_scenario, rng):
    t, p = 12, 3
    gains = rng.standard_normal((t, p)) + 1j * rng.standard_normal((t, p))
    delays = rng.uniform(1e-7, 4e-6, (t, p))
    series = extract_series(_make_trace(small_scenario, gains, delays))

    assert series.values.shape == (4, p, t - 1)
    assert series.dt == small_scenario.snapshot_interval_s
    np.testing.assert_allclose(
        series.channel("intensity_db"), 20 * np.log10(np.abs(gains[1:])).T
    )
    np.testing.assert_allclose(series.channel("delay_s"), delays[1:].T)
    dphi = series.channel("phase_diff_rad")
    np.testing.assert_allclose(
        series.channel("doppler_hz"), dphi / (2 * np.pi * series.dt)
    )
    assert not series.flagged.any()

    # gains are recoverable: magnitude from intensity, phase by cumulating
    # the differences on top of the initial snapshot's phase
    mag = 10 ** (series.channel("intensity_db") / 20.0)
    phase = np.angle(gains[0])[:, None] + np.cumsum(dphi, axis=1)
    rebuilt = (mag * np.exp(1j * phase)).T
    ratio = rebuilt / gains[1:]
    np.testing.assert_allclose(ratio, 1.0, atol=1e-10)


def test_extract_series_zero_gain_floor_and_carry(small_scenario):
    gains = np.ones((5, 1), dtype=complex)
    gains[1, 0] = np.exp(1j * 0.4)
    gains[2, 0] = 0.0  # dropout
    gains[3, 0] = np.exp(1j * 1.0)
    series = extract_series(_make_trace(small_scenario, gains))

    intensity = series.channel("intensity_db")[0]
    assert intensity[1] == ZERO_GAIN_FLOOR_DB
    assert intensity[0] == pytest.approx(0.0)

    dphi = series.channel("phase_diff_rad")[0]
    assert dphi[0] == pytest.approx(0.4)
    # both steps touching the dropout repeat the last valid difference
    assert dphi[1] == pytest.approx(0.4)
    assert dphi[2] == pytest.approx(0.4)
    assert dphi[3] == pytest.approx(-1.0)
    np.testing.assert_array_equal(series.flagged[0], [False, True, True, False])


def test_extract_series_zero_gain_at_start_defaults_to_zero(small_scenario):
    gains = np.ones((3, 1), dtype=complex)
    gains[0, 0] = 0.0
    series = extract_series(_make_trace(small_scenario, gains))
    assert series.channel("phase_diff_rad")[0, 0] == 0.0
    assert series.flagged[0, 0]


def test_extract_series_needs_two_snapshots(small_scenario):
    with pytest.raises(ValueError):
        extract_series(_make_trace(small_scenario, np.ones((1, 2))))


def test_extract_series_from_generated_trace(small_scenario):
    trace = generate_trace(small_scenario, lane=1)
    series = extract_series(trace)
    assert series.n_paths == small_scenario.n_paths
    assert series.n_steps == trace.n_snapshots - 1
    assert np.isfinite(series.values).all()
    # Doppler estimates live in the unambiguous band
    band = 1.0 / (2.0 * series.dt)
    assert np.all(np.abs(series.channel("doppler_hz")) <= band)
    assert np.all(series.channel("delay_s") > 0)


# ---------------------------------------------------------------- containers


def test_param_vector_shape_check():
    ok = np.zeros(3)
    with pytest.raises(ValueError):
        DDParamVector(ok, ok, ok, np.zeros(4))
    vec = DDParamVector(ok, ok, ok, ok)
    assert vec.n_paths == 3


def test_series_at_step_round_trip(small_scenario, rng):
    gains = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    series = extract_series(_make_trace(small_scenario, gains))
    vec = series.at_step(3)
    np.testing.assert_array_equal(vec.intensity_db, series.values[0, :, 3])
    np.testing.assert_array_equal(vec.doppler_hz, series.values[3, :, 3])


def test_series_rejects_bad_shape():
    with pytest.raises(ValueError):
        DDSeries(values=np.zeros((3, 2, 5)), path_ids=np.arange(2), dt=5e-4)


def test_param_types_order():
    assert PARAM_TYPES == ("intensity_db", "phase_diff_rad", "delay_s", "doppler_hz")


# ---------------------------------------------------------------- path loss


def test_path_loss_single_path():
    assert reconstruct_path_loss(np.array([-80.0])) == pytest.approx(80.0)


def test_path_loss_combines_powers():
    # two equal -80 dB paths double the power: 3 dB less loss
    out = reconstruct_path_loss(np.array([-80.0, -80.0]))
    assert out == pytest.approx(80.0 - 10 * np.log10(2.0))


def test_path_loss_vectorized_and_from_vector():
    arr = np.array([[-80.0, -90.0], [-70.0, -70.0]])
    out = reconstruct_path_loss(arr)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(70.0 - 10 * np.log10(2.0))
    vec = DDParamVector(
        np.array([-60.0]), np.zeros(1), np.zeros(1), np.zeros(1)
    )
    assert reconstruct_path_loss(vec) == pytest.approx(60.0)


def test_path_loss_rejects_empty():
    with pytest.raises(ValueError):
        reconstruct_path_loss(np.array([]))
