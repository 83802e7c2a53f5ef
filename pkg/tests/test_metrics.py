"""Forecast metrics: weighted MAE laws, CDFs, horizon and path-loss scores."""

import numpy as np
import pytest

from ddpredict.evaluation.metrics import (
    error_cdf,
    horizon_eval,
    horizon_mae_from_errors,
    horizon_path_loss_errors,
    intensity_weights,
    path_loss_eval,
    weighted_mae,
)
from ddpredict.models.persistence import PersistenceForecaster
from ddpredict.series.extract import DDSeries, reconstruct_path_loss
from ddpredict.series.windowing import WindowedDataset


def _dd(intensity):
    intensity = np.asarray(intensity, dtype=float)
    p, t = intensity.shape
    values = np.zeros((4, p, t))
    values[0] = intensity
    return DDSeries(values=values, path_ids=np.arange(p), dt=5e-4)


# ---------------------------------------------------------------- wMAE


def test_weighted_mae_hand_example():
    pred = np.array([[1.0, 2.0], [0.0, 0.0]])
    truth = np.array([[0.0, 0.0], [1.0, 3.0]])
    # per-path MAE: [1.5, 2.0]; weights [3, 1] -> (3*1.5 + 2)/4
    out = weighted_mae(pred, truth, np.array([3.0, 1.0]))
    assert out == pytest.approx((3 * 1.5 + 2.0) / 4.0)


def test_weighted_mae_rescale_invariance(rng):
    pred = rng.standard_normal((4, 30))
    truth = rng.standard_normal((4, 30))
    w = rng.uniform(0.1, 5.0, 4)
    base = weighted_mae(pred, truth, w)
    for scale in (1e-6, 3.0, 1e9):
        assert abs(weighted_mae(pred, truth, scale * w) - base) < 1e-12


def test_weighted_mae_uniform_weights_reduce_to_mean(rng):
    pred = rng.standard_normal((5, 20))
    truth = rng.standard_normal((5, 20))
    out = weighted_mae(pred, truth, np.ones(5))
    assert out == pytest.approx(np.mean(np.abs(pred - truth)))


def test_weighted_mae_zero_weight_drops_path(rng):
    pred = rng.standard_normal((2, 10))
    truth = rng.standard_normal((2, 10))
    out = weighted_mae(pred, truth, np.array([1.0, 0.0]))
    assert out == pytest.approx(np.mean(np.abs(pred[0] - truth[0])))


def test_weighted_mae_validation(rng):
    pred = rng.standard_normal((2, 5))
    with pytest.raises(ValueError, match="mismatch"):
        weighted_mae(pred, pred[:, :3], np.ones(2))
    with pytest.raises(ValueError, match="weight"):
        weighted_mae(pred, pred, np.ones(3))
    with pytest.raises(ValueError, match="non-negative"):
        weighted_mae(pred, pred, np.array([1.0, -1.0]))
    with pytest.raises(ValueError, match="zero"):
        weighted_mae(pred, pred, np.zeros(2))


def test_intensity_weights_decibel_to_linear():
    w = intensity_weights(np.array([[0.0, 0.0], [-10.0, -10.0]]))
    np.testing.assert_allclose(w, [1.0, 0.1])
    # time average in the linear domain
    w = intensity_weights(np.array([[0.0, -10.0]]))
    assert w[0] == pytest.approx((1.0 + 0.1) / 2.0)


# ---------------------------------------------------------------- CDF


def test_error_cdf_monotone_and_complete(rng):
    values, fractions = error_cdf(rng.exponential(1.0, 500))
    assert np.all(np.diff(values) >= 0)
    assert np.all(np.diff(fractions) >= 0)
    assert fractions[-1] == 1.0
    assert np.all((fractions > 0) & (fractions <= 1))


def test_error_cdf_ties_share_fraction():
    values, fractions = error_cdf(np.array([1.0, 1.0, 2.0, 0.5]))
    np.testing.assert_array_equal(values, [0.5, 1.0, 1.0, 2.0])
    np.testing.assert_allclose(fractions, [0.25, 0.75, 0.75, 1.0])


def test_error_cdf_rejects_empty():
    with pytest.raises(ValueError):
        error_cdf(np.array([]))


# ---------------------------------------------------------------- horizon


def test_horizon_eval_prefix_means(rng):
    targets = rng.standard_normal((6, 10))
    contexts = rng.standard_normal((6, 20))
    model = PersistenceForecaster()
    out = horizon_eval(
        model,
        WindowedDataset(
            contexts=contexts,
            targets=targets,
            trace_ids=["t"] * 6,
            path_ids=np.zeros(6, dtype=int),
            param_types=["delay_s"] * 6,
            starts=np.zeros(6, dtype=int),
            epsilon=20,
            lam=10,
            stride=1,
        ),
        horizons=(5, 10),
    )
    pred = np.repeat(contexts[:, -1:], 10, axis=1)
    assert out[5] == pytest.approx(np.mean(np.abs(pred[:, :5] - targets[:, :5])))
    assert out[10] == pytest.approx(np.mean(np.abs(pred - targets)))


def test_horizon_eval_rejects_long_horizon(rng):
    ds = WindowedDataset(
        contexts=rng.standard_normal((2, 20)),
        targets=rng.standard_normal((2, 10)),
        trace_ids=["t"] * 2,
        path_ids=np.zeros(2, dtype=int),
        param_types=["delay_s"] * 2,
        starts=np.zeros(2, dtype=int),
        epsilon=20,
        lam=10,
        stride=1,
    )
    with pytest.raises(ValueError, match="horizon"):
        horizon_eval(PersistenceForecaster(), ds, horizons=(11,))


# ---------------------------------------------------------------- path loss


def test_path_loss_eval_matches_reconstruction(rng):
    truth_int = rng.uniform(-100.0, -60.0, (3, 8))
    pred_int = truth_int + rng.normal(0.0, 1.0, (3, 8))
    mae, overlay = path_loss_eval(_dd(pred_int), _dd(truth_int))
    want = np.mean(
        np.abs(reconstruct_path_loss(pred_int.T) - reconstruct_path_loss(truth_int.T))
    )
    assert mae == pytest.approx(want)
    assert overlay["t_s"].shape == (8,)
    assert overlay["truth_db"].shape == (8,)
    np.testing.assert_allclose(overlay["pred_db"], reconstruct_path_loss(pred_int.T))
    assert overlay["t_s"][1] == pytest.approx(5e-4)


def test_path_loss_eval_perfect_forecast_is_zero(rng):
    intensity = rng.uniform(-90.0, -70.0, (2, 6))
    mae, _ = path_loss_eval(_dd(intensity), _dd(intensity))
    assert mae == 0.0


def test_path_loss_eval_shape_mismatch(rng):
    with pytest.raises(ValueError, match="disagree"):
        path_loss_eval(_dd(np.zeros((2, 5))), _dd(np.zeros((2, 6))))


# ------------------------------------------------- anchored horizon errors


def test_horizon_path_loss_errors_persistence_oracle(rng):
    mean_db, std_db = -80.0, 4.0
    vals = rng.standard_normal((3, 40))
    eps, h_max, stride = 6, 4, 5
    err = horizon_path_loss_errors(
        PersistenceForecaster(), vals, mean_db, std_db, eps, h_max, stride=stride
    )
    anchors = list(range(eps, 40 - h_max + 1, stride))
    assert err.shape == (len(anchors), h_max)
    for i, a in enumerate(anchors):
        hold = vals[:, a - 1] * std_db + mean_db  # persistence repeats this
        pred_pl = reconstruct_path_loss(hold)
        for h in range(h_max):
            truth_pl = reconstruct_path_loss(vals[:, a + h] * std_db + mean_db)
            assert err[i, h] == pytest.approx(abs(pred_pl - truth_pl))


def test_horizon_path_loss_errors_anchor_cap_and_validation(rng):
    vals = rng.standard_normal((2, 30))
    err = horizon_path_loss_errors(
        PersistenceForecaster(), vals, 0.0, 1.0, 5, 3, stride=2, max_anchors=4
    )
    assert err.shape == (4, 3)
    with pytest.raises(ValueError, match="paths, steps"):
        horizon_path_loss_errors(PersistenceForecaster(), vals[0], 0.0, 1.0, 5, 3)
    with pytest.raises(ValueError, match="too short"):
        horizon_path_loss_errors(PersistenceForecaster(), vals, 0.0, 1.0, 28, 3)
    with pytest.raises(ValueError, match="positive"):
        horizon_path_loss_errors(PersistenceForecaster(), vals, 0.0, 1.0, 0, 3)


def test_horizon_mae_prefix_means():
    err = np.array([[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])
    out = horizon_mae_from_errors(err, (1, 2, 3))
    assert out[1] == pytest.approx(1.5)
    assert out[2] == pytest.approx(2.5)
    assert out[3] == pytest.approx(3.5)
    with pytest.raises(ValueError, match="horizon"):
        horizon_mae_from_errors(err, (4,))


# ---------------------------------------------------------------- persistence


def test_persistence_repeats_last_value(rng):
    contexts = rng.standard_normal((3, 20))
    out = PersistenceForecaster().predict(contexts, 10)
    assert out.shape == (3, 10)
    for h in range(10):
        np.testing.assert_array_equal(out[:, h], contexts[:, -1])
