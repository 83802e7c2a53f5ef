"""Training loop and the synthetic pre-training corpus.

One loop serves every trainable model kind: sample a batch, get loss and
gradients from the model, apply an Adam step, record the loss.  Everything
is derived from the seed in the config, so a rerun reproduces the loss
curve bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ddpredict.errors import NumericalError
from ddpredict.models.optim import Adam
from ddpredict.series.windowing import WindowedDataset


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; the fine-tune default keeps lr at 1e-5.

    ``shift_aug`` adds a per-sample random level offset to context and
    target together, teaching level equivariance that a larger corpus of
    trajectories would otherwise provide.
    """

    lr: float = 1e-5
    optimizer: str = "adam"
    batch_size: int = 64
    max_steps: int = 400
    loss: str = "mae"
    seed: int = 0
    shift_aug: float = 0.0

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if self.optimizer != "adam":
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.batch_size < 1 or self.max_steps < 1:
            raise ValueError("batch size and max steps must be >= 1")
        if self.loss not in ("mse", "mae"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.shift_aug < 0:
            raise ValueError("shift_aug must be non-negative")

    def replace(self, **kw) -> "TrainConfig":
        return replace(self, **kw)


def train(
    model,
    dataset: WindowedDataset,
    cfg: TrainConfig,
    resume: bool = False,
) -> tuple[object, list[float]]:
    """Fit a model on windowed samples; returns (model, per-step loss curve).

    With ``resume`` the model's current parameters are the starting point
    (fine-tuning); otherwise they are freshly initialized from the seed.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("dataset is empty")
    if not resume or model.params is None:
        model.init_params(cfg.seed)
    opt = Adam(lr=cfg.lr)
    rng = np.random.default_rng([cfg.seed, 7])
    curve: list[float] = []
    for step in range(cfg.max_steps):
        idx = rng.integers(0, n, cfg.batch_size)
        contexts = dataset.contexts[idx]
        targets = dataset.targets[idx]
        if cfg.shift_aug > 0.0:
            shifts = rng.normal(0.0, cfg.shift_aug, (cfg.batch_size, 1))
            contexts = contexts + shifts
            targets = targets + shifts
        loss, grads = model.loss_and_grads(contexts, targets, cfg.loss)
        if not np.isfinite(loss):
            raise NumericalError(
                f"loss diverged at step {step}: {loss!r} (lr={cfg.lr}, kind={model.kind})"
            )
        opt.update(model.params, grads)
        curve.append(loss)
    return model, curve


def _standardize(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    if sd == 0.0:
        return x - x.mean()
    return (x - x.mean()) / sd


def pretrain_corpus(
    seed: int, n_series: int = 4000, length: int = 30
) -> WindowedDataset:
    """Synthetic series families standing in for a large pre-training corpus.

    Equal parts sinusoids, stable AR(2) processes, noisy linear trends,
    piecewise-constant levels, and slowly drifting near-constant levels.
    The first four are standardized then randomly rescaled and offset so
    the value range brackets normalized channel data; the drifting family
    keeps its native tiny variation, covering the smooth low-motion regime.
    The source tag keeps the corpus distinguishable from channel datasets.
    """
    rng = np.random.default_rng([seed, 11])
    series = np.empty((n_series, length))
    t = np.arange(length)
    for i in range(n_series):
        family = i % 5
        if family == 0:
            freq = rng.uniform(0.02, 0.45)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            x = np.sin(2.0 * np.pi * freq * t + phase)
            if rng.uniform() < 0.5:
                x = x + 0.3 * np.sin(2.0 * np.pi * rng.uniform(0.02, 0.45) * t)
        elif family == 1:
            # AR(2) with complex poles at radius < 1 keeps the series stable
            radius = rng.uniform(0.5, 0.98)
            theta = rng.uniform(0.1, np.pi - 0.1)
            a1 = 2.0 * radius * np.cos(theta)
            a2 = -radius * radius
            x = np.empty(length + 20)
            x[0] = rng.standard_normal()
            x[1] = rng.standard_normal()
            eps = rng.standard_normal(length + 20)
            for k in range(2, length + 20):
                x[k] = a1 * x[k - 1] + a2 * x[k - 2] + 0.3 * eps[k]
            x = x[20:]
        elif family == 2:
            slope = rng.uniform(-0.1, 0.1)
            x = slope * t + 0.15 * rng.standard_normal(length)
        elif family == 3:
            n_segments = rng.integers(2, 5)
            cuts = np.sort(rng.choice(np.arange(1, length), n_segments - 1, replace=False))
            levels = rng.uniform(-1.5, 1.5, n_segments)
            x = np.empty(length)
            prev = 0
            for lvl, cut in zip(levels, list(cuts) + [length]):
                x[prev:cut] = lvl
                prev = cut
        else:
            # near-constant level with a slow drift and a gentle arc; no
            # per-series standardization, which would erase the tiny scale
            level = rng.uniform(-2.0, 2.0)
            drift = rng.uniform(-1.0, 1.0) * 10.0 ** rng.uniform(-4.0, -1.5)
            amp = 10.0 ** rng.uniform(-4.0, -1.5)
            freq = rng.uniform(0.002, 0.03)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            series[i] = level + drift * t + amp * np.sin(2.0 * np.pi * freq * t + phase)
            continue
        x = _standardize(x)
        scale = rng.uniform(0.5, 2.0)
        offset = rng.uniform(-1.0, 1.0)
        series[i] = scale * x + offset

    epsilon = 20
    lam = length - epsilon
    return WindowedDataset(
        contexts=series[:, :epsilon],
        targets=series[:, epsilon:],
        trace_ids=[f"pretrain{i}" for i in range(n_series)],
        path_ids=np.zeros(n_series, dtype=int),
        param_types=["synthetic"] * n_series,
        starts=np.zeros(n_series, dtype=int),
        epsilon=epsilon,
        lam=lam,
        stride=1,
        split="pretrain",
        source="pretrain",
    )
