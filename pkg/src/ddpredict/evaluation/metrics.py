"""Forecast error metrics.

All metrics operate on denormalized values; weighting uses mean linear
path power so the strongest sub-path dominates the score.
"""

from __future__ import annotations

import numpy as np

from ddpredict.series.extract import DDSeries, reconstruct_path_loss


def weighted_mae(pred: np.ndarray, truth: np.ndarray, weights: np.ndarray) -> float:
    """Per-path MAE averaged with non-negative path weights.

    pred/truth are (P, ...) with path first; weights (P,).  Weight
    rescaling cancels, so only relative weights matter.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {truth.shape}")
    if weights.shape != (pred.shape[0],):
        raise ValueError("need one weight per path")
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    total = weights.sum()
    if total == 0:
        raise ValueError("weights must not all be zero")
    per_path = np.abs(pred - truth).reshape(pred.shape[0], -1).mean(axis=1)
    return float(np.dot(weights, per_path) / total)


def intensity_weights(truth_intensity_db: np.ndarray) -> np.ndarray:
    """Mean linear power per path over the evaluation window.

    truth_intensity_db is (P, T) in dB; returns (P,) weights.
    """
    truth_intensity_db = np.asarray(truth_intensity_db, dtype=float)
    return np.power(10.0, truth_intensity_db / 10.0).reshape(
        truth_intensity_db.shape[0], -1
    ).mean(axis=1)


def error_cdf(abs_errors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF as (sorted values, cumulative fractions).

    Tied values share the fraction of samples at or below them, so the
    fraction column is non-decreasing and ends at exactly 1.
    """
    abs_errors = np.asarray(abs_errors, dtype=float).reshape(-1)
    if abs_errors.size == 0:
        raise ValueError("empirical CDF needs at least one sample")
    values = np.sort(abs_errors)
    fractions = np.searchsorted(values, values, side="right") / values.size
    return values, fractions


def horizon_eval(
    model, dataset, horizons: tuple[int, ...] = (5, 10)
) -> dict[int, float]:
    """Plain MAE over the first h forecast steps, per horizon."""
    for h in horizons:
        if h > dataset.lam:
            raise ValueError(f"horizon {h} exceeds target length {dataset.lam}")
    preds = model.predict(dataset.contexts, dataset.lam)
    out = {}
    for h in horizons:
        out[h] = float(np.mean(np.abs(preds[:, :h] - dataset.targets[:, :h])))
    return out


def horizon_path_loss_errors(
    model,
    intensity_norm: np.ndarray,
    mean_db: float,
    std_db: float,
    epsilon: int,
    h_max: int,
    stride: int = 1,
    max_anchors: int | None = None,
) -> np.ndarray:
    """Absolute path-loss error per (anchor, lead) for one lane.

    At each anchor t the model forecasts h_max steps of every path's
    normalized intensity from the epsilon-step context ending at t.  Both
    forecast and truth are mapped back to dB and combined into a total
    path loss; the returned matrix is (n_anchors, h_max) so different
    horizons are compared on the identical anchor set.
    """
    vals = np.asarray(intensity_norm, dtype=float)
    if vals.ndim != 2:
        raise ValueError(f"intensity series must be (paths, steps), got {vals.shape}")
    n_paths, n_steps = vals.shape
    if epsilon < 1 or h_max < 1:
        raise ValueError("context and horizon must be positive")
    anchors = np.arange(epsilon, n_steps - h_max + 1, stride)
    if max_anchors is not None:
        anchors = anchors[:max_anchors]
    if anchors.size == 0:
        raise ValueError(f"series too short for context {epsilon} + horizon {h_max}")
    ctx = np.stack([vals[:, a - epsilon : a] for a in anchors])
    truth = np.stack([vals[:, a : a + h_max] for a in anchors])
    n_anchors = anchors.size
    preds = model.predict(ctx.reshape(n_anchors * n_paths, epsilon), h_max)
    preds = preds.reshape(n_anchors, n_paths, h_max)
    pred_db = preds * std_db + mean_db
    truth_db = truth * std_db + mean_db
    err = np.empty((n_anchors, h_max))
    for h in range(h_max):
        pred_pl = reconstruct_path_loss(pred_db[:, :, h])
        truth_pl = reconstruct_path_loss(truth_db[:, :, h])
        err[:, h] = np.abs(np.atleast_1d(pred_pl - truth_pl))
    return err


def horizon_mae_from_errors(
    errors: np.ndarray, horizons: tuple[int, ...]
) -> dict[int, float]:
    """Prefix means of an (anchors, leads) error matrix, one per horizon."""
    errors = np.asarray(errors, dtype=float)
    out = {}
    for h in horizons:
        if not 1 <= h <= errors.shape[1]:
            raise ValueError(f"horizon {h} outside 1..{errors.shape[1]}")
        out[h] = float(errors[:, :h].mean())
    return out


def path_loss_eval(
    pred_series: DDSeries, truth_series: DDSeries
) -> tuple[float, dict[str, np.ndarray]]:
    """Compare reconstructed path loss of forecast vs truth.

    Combines per-path intensities into a total-power path loss at each
    step; returns (MAE in dB, overlay arrays {t_s, truth_db, pred_db}).
    """
    if pred_series.values.shape != truth_series.values.shape:
        raise ValueError(
            "forecast and truth disagree on paths/steps: "
            f"{pred_series.values.shape} vs {truth_series.values.shape}"
        )
    pred_pl = reconstruct_path_loss(pred_series.channel("intensity_db").T)
    truth_pl = reconstruct_path_loss(truth_series.channel("intensity_db").T)
    mae = float(np.mean(np.abs(pred_pl - truth_pl)))
    t_s = np.arange(truth_series.n_steps) * truth_series.dt
    return mae, {"t_s": t_s, "truth_db": np.atleast_1d(truth_pl), "pred_db": np.atleast_1d(pred_pl)}
