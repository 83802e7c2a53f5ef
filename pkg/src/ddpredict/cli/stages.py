"""Pipeline stages: generate, extract, pretrain, train, evaluate, report.

Each stage is a function from input artifacts to output files, returning a
dict of the paths it wrote.  ``run_cell`` chains the per-scenario stages;
``run_reproduce`` covers all requested scenario cells and assembles the
cross-cell report.  Every stage is deterministic given its inputs, so
reruns produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from ddpredict.channel.trace import generate_trace, read_trace, write_trace
from ddpredict.cli import svgplot
from ddpredict.errors import ConfigError, MissingArtifactError
from ddpredict.evaluation.metrics import (
    horizon_mae_from_errors,
    horizon_path_loss_errors,
    intensity_weights,
    path_loss_eval,
    weighted_mae,
)
from ddpredict.evaluation.report import (
    EvalReport,
    write_cdf_csv,
    write_horizon_csv,
    write_loss_curve_csv,
    write_overlay_csv,
    write_report_csv,
)
from ddpredict.models.checkpoint import (
    forecaster_from_checkpoint,
    save_forecaster,
)
from ddpredict.models.persistence import PersistenceForecaster
from ddpredict.models.recurrent import GRUForecaster, LSTMForecaster, RecurrentConfig
from ddpredict.models.training import TrainConfig, pretrain_corpus, train
from ddpredict.models.transformer import TransformerConfig, TransformerForecaster
from ddpredict.scenario import ScenarioConfig, bundled_scenario_path, load_scenario
from ddpredict.series.extract import PARAM_TYPES, DDSeries, extract_series
from ddpredict.series.normalize import (
    NormStats,
    compute_stats,
    denormalize_values,
    normalize,
)
from ddpredict.series.windowing import (
    read_series,
    read_windows,
    window,
    write_series,
    write_windows,
    WindowedDataset,
)

CELLS = ("los_60", "los_120", "nlos_60", "nlos_120")
MODEL_NAMES = (
    "transformer_finetuned",
    "transformer_zeroshot",
    "lstm",
    "gru",
    "persistence",
)
TRAINED_MODELS = ("transformer_finetuned", "lstm", "gru")
TRAIN_LANES = (0, 2, 4)
TEST_LANES = (1, 3, 5)


@dataclass(frozen=True)
class Budgets:
    """Desk-scale compute budgets for one experiment run.

    The fine-tune learning rate here is deliberately larger than the
    TrainConfig default so short desk runs converge; pass a budgets file to
    restore full-scale settings.
    """

    epsilon: int = 20
    lam: int = 10
    seed: int = 7
    duration_s: float | None = None  # None keeps the scenario's duration
    pretrain_series: int = 4000
    pretrain_steps: int = 1200
    pretrain_lr: float = 1e-3
    finetune_steps: int = 1000
    finetune_lr: float = 3e-5
    rnn_steps: int = 1000
    rnn_lr: float = 3e-3
    shift_aug: float = 1.0
    batch_size: int = 64
    train_stride: int = 1
    eval_stride: int = 10
    horizon_anchors: int = 400
    overlay_segment: int = 200
    cdf_cap: int = 5000
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 4
    d_ff: int = 128
    segment_len: int = 5
    rnn_hidden: int = 32

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Budgets":
        return cls(**d)

    def transformer_config(self) -> TransformerConfig:
        return TransformerConfig(
            d_model=self.d_model,
            n_layers=self.n_layers,
            n_heads=self.n_heads,
            d_ff=self.d_ff,
            segment_len=self.segment_len,
            max_tokens=16,
        )

    def recurrent_config(self) -> RecurrentConfig:
        return RecurrentConfig(hidden=self.rnn_hidden, horizon=self.lam)


SMOKE_BUDGETS = Budgets(
    duration_s=0.25,
    pretrain_series=600,
    pretrain_steps=150,
    finetune_steps=60,
    rnn_steps=80,
    eval_stride=20,
    horizon_anchors=60,
    overlay_segment=100,
    cdf_cap=1000,
)


def _require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"{what} not found: {path}")
    return path


def resolve_scenario(cell: str) -> Path:
    """Bundled scenario path for a cell name, or the path itself if a file."""
    p = Path(cell)
    if p.suffix == ".toml" and p.exists():
        return p
    if cell in CELLS:
        return bundled_scenario_path(cell)
    raise ConfigError(f"unknown scenario {cell!r}; expected a .toml path or one of {CELLS}")


def stage_generate(
    scenario_path: str | Path,
    out_dir: str | Path,
    seed: int | None = None,
    budgets: Budgets = Budgets(),
) -> dict:
    """Generate one trace per lane of the scenario."""
    config = load_scenario(_require(scenario_path, "scenario file"))
    if seed is not None:
        config = config.replace(seed=seed)
    if budgets.duration_s is not None:
        config = config.replace(duration_s=budgets.duration_s)
    config.validate()
    out_dir = Path(out_dir)
    traces = {}
    for lane in range(config.n_lanes):
        trace = generate_trace(config, lane)
        path = out_dir / f"lane{lane}.csv"
        write_trace(path, trace)
        traces[f"lane{lane}"] = str(path)
    return {
        "scenario": str(scenario_path),
        "scenario_name": config.name,
        "speed_kmh": config.speed_kmh,
        "los_mode": config.los_mode,
        "seed": config.seed,
        "duration_s": config.duration_s,
        "snapshot_interval_s": config.snapshot_interval_s,
        "n_paths": config.n_paths,
        "traces": traces,
    }


def _trace_config(gen_art: dict) -> ScenarioConfig:
    config = load_scenario(_require(gen_art["scenario"], "scenario file"))
    return config.replace(seed=gen_art["seed"], duration_s=gen_art["duration_s"])


def stage_extract(gen_art: dict, out_dir: str | Path, budgets: Budgets = Budgets()) -> dict:
    """Extract parameter series, fit train-split stats, index windows."""
    out_dir = Path(out_dir)
    config = _trace_config(gen_art)
    series_raw: dict[str, DDSeries] = {}
    for lane_name, trace_path in gen_art["traces"].items():
        lane = int(lane_name.removeprefix("lane"))
        trace = read_trace(_require(trace_path, "trace file"), config, lane)
        series_raw[lane_name] = extract_series(trace)

    train_names = [f"lane{i}" for i in TRAIN_LANES if f"lane{i}" in series_raw]
    test_names = [f"lane{i}" for i in TEST_LANES if f"lane{i}" in series_raw]
    if not train_names or not test_names:
        raise ConfigError("need at least one train lane and one test lane")

    stats = compute_stats([series_raw[n] for n in train_names])
    norm_train = {n: normalize(series_raw[n], stats)[0] for n in train_names}
    norm_test = {n: normalize(series_raw[n], stats)[0] for n in test_names}

    paths = {
        "series_train": str(out_dir / "series_train.csv"),
        "series_test": str(out_dir / "series_test.csv"),
        "stats": str(out_dir / "stats.json"),
        "windows_train": str(out_dir / "windows_train.csv"),
        "windows_test": str(out_dir / "windows_test.csv"),
    }
    write_series(paths["series_train"], {n: series_raw[n] for n in train_names})
    write_series(paths["series_test"], {n: series_raw[n] for n in test_names})
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(paths["stats"], "w") as fh:
        json.dump(stats.as_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")

    train_ds = WindowedDataset.merge(
        [
            window(norm_train[n], budgets.epsilon, budgets.lam, budgets.train_stride, n, "train")
            for n in train_names
        ]
    )
    test_ds = WindowedDataset.merge(
        [
            window(norm_test[n], budgets.epsilon, budgets.lam, budgets.eval_stride, n, "test")
            for n in test_names
        ]
    )
    write_windows(paths["windows_train"], train_ds)
    write_windows(paths["windows_test"], test_ds)
    return paths


def load_extracted(extract_art: dict):
    """Materialize (train windows, test windows, stats, raw test series)."""
    stats_path = _require(extract_art["stats"], "normalization stats")
    with open(stats_path) as fh:
        stats = NormStats.from_dict(json.load(fh))
    raw_train = read_series(_require(extract_art["series_train"], "train series"))
    raw_test = read_series(_require(extract_art["series_test"], "test series"))
    norm_train = {n: normalize(s, stats)[0] for n, s in raw_train.items()}
    norm_test = {n: normalize(s, stats)[0] for n, s in raw_test.items()}
    train_ds = read_windows(_require(extract_art["windows_train"], "train windows"), norm_train)
    test_ds = read_windows(_require(extract_art["windows_test"], "test windows"), norm_test)
    return train_ds, test_ds, stats, raw_test, norm_test


def stage_pretrain(out_dir: str | Path, budgets: Budgets = Budgets()) -> dict:
    """Pre-train the transformer on the synthetic corpus (MSE loss)."""
    out_dir = Path(out_dir)
    corpus = pretrain_corpus(budgets.seed, budgets.pretrain_series, budgets.epsilon + budgets.lam)
    model = TransformerForecaster(budgets.transformer_config())
    cfg = TrainConfig(
        lr=budgets.pretrain_lr,
        batch_size=budgets.batch_size,
        max_steps=budgets.pretrain_steps,
        loss="mse",
        seed=budgets.seed,
        shift_aug=budgets.shift_aug,
    )
    model, curve = train(model, corpus, cfg)
    ckpt = out_dir / "ckpt_transformer_pretrained.bin"
    save_forecaster(ckpt, model)
    loss_csv = out_dir / "loss_pretrain.csv"
    write_loss_curve_csv(loss_csv, curve)
    return {"checkpoint": str(ckpt), "loss_curve": str(loss_csv)}


def _train_seed(budgets: Budgets, model_name: str, param_type: str) -> int:
    return (
        budgets.seed * 1000
        + TRAINED_MODELS.index(model_name) * 10
        + PARAM_TYPES.index(param_type)
    )


def stage_train(
    extract_art: dict,
    pretrain_art: dict,
    out_dir: str | Path,
    budgets: Budgets = Budgets(),
    only_model: str | None = None,
    max_steps_override: int | None = None,
) -> dict:
    """Fine-tune the transformer and fit the recurrent baselines per type."""
    out_dir = Path(out_dir)
    train_ds, _, _, _, _ = load_extracted(extract_art)
    pretrain_ckpt = _require(pretrain_art["checkpoint"], "pretrained checkpoint")
    art: dict = {"checkpoints": {}, "loss_curves": {}}
    for model_name in TRAINED_MODELS:
        if only_model is not None and model_name != only_model:
            continue
        for ptype in PARAM_TYPES:
            ds = train_ds.filter_param(ptype)
            if model_name == "transformer_finetuned":
                model = forecaster_from_checkpoint(pretrain_ckpt)
                cfg = TrainConfig(
                    lr=budgets.finetune_lr,
                    batch_size=budgets.batch_size,
                    max_steps=max_steps_override or budgets.finetune_steps,
                    loss="mae",
                    seed=_train_seed(budgets, model_name, ptype),
                    shift_aug=budgets.shift_aug,
                )
                model, curve = train(model, ds, cfg, resume=True)
            else:
                klass = LSTMForecaster if model_name == "lstm" else GRUForecaster
                model = klass(budgets.recurrent_config())
                cfg = TrainConfig(
                    lr=budgets.rnn_lr,
                    batch_size=budgets.batch_size,
                    max_steps=max_steps_override or budgets.rnn_steps,
                    loss="mae",
                    seed=_train_seed(budgets, model_name, ptype),
                    shift_aug=budgets.shift_aug,
                )
                model, curve = train(model, ds, cfg)
            ckpt = out_dir / f"ckpt_{model_name}_{ptype}.bin"
            save_forecaster(ckpt, model)
            loss_csv = out_dir / f"loss_{model_name}_{ptype}.csv"
            write_loss_curve_csv(loss_csv, curve)
            art["checkpoints"][f"{model_name}.{ptype}"] = str(ckpt)
            art["loss_curves"][f"{model_name}.{ptype}"] = str(loss_csv)
    return art


def _load_models(
    train_art: dict, pretrain_art: dict, only_model: str | None = None
) -> dict[str, dict[str, object]]:
    """Per model name, a forecaster per parameter type."""
    models: dict[str, dict[str, object]] = {}
    zero = None
    for name in MODEL_NAMES:
        if only_model is not None and name != only_model:
            continue
        per_type: dict[str, object] = {}
        for ptype in PARAM_TYPES:
            if name == "persistence":
                per_type[ptype] = PersistenceForecaster()
            elif name == "transformer_zeroshot":
                if zero is None:
                    zero = forecaster_from_checkpoint(
                        _require(pretrain_art["checkpoint"], "pretrained checkpoint")
                    )
                per_type[ptype] = zero
            else:
                key = f"{name}.{ptype}"
                if key not in train_art["checkpoints"]:
                    raise MissingArtifactError(f"checkpoint for {key} not in train artifacts")
                per_type[ptype] = forecaster_from_checkpoint(
                    _require(train_art["checkpoints"][key], f"checkpoint {key}")
                )
        models[name] = per_type
    return models


def stitched_forecast(
    models_by_type: dict[str, object],
    norm_series: DDSeries,
    epsilon: int,
    horizon: int,
    n_steps: int,
) -> tuple[DDSeries, DDSeries]:
    """Forecast a contiguous segment in blocks of ``horizon`` steps.

    Block k predicts steps [epsilon + k*horizon, epsilon + (k+1)*horizon)
    of the series from the epsilon steps just before it.  Returns
    (forecast, truth) DDSeries aligned on the forecast segment.
    """
    n_blocks = n_steps // horizon
    if n_blocks < 1:
        raise ValueError("segment shorter than one horizon block")
    total = epsilon + n_blocks * horizon
    if norm_series.n_steps < total:
        raise ValueError(f"series too short: {norm_series.n_steps} < {total}")
    p_count = norm_series.n_paths
    out = np.empty((len(PARAM_TYPES), p_count, n_blocks * horizon))
    for p, ptype in enumerate(PARAM_TYPES):
        model = models_by_type[ptype]
        contexts = []
        for k in range(n_blocks):
            s = epsilon + k * horizon
            contexts.append(norm_series.values[p, :, s - epsilon : s])
        contexts = np.concatenate(contexts, axis=0)  # (n_blocks*P, epsilon)
        preds = model.predict(contexts, horizon)
        for k in range(n_blocks):
            out[p, :, k * horizon : (k + 1) * horizon] = preds[
                k * p_count : (k + 1) * p_count
            ]
    truth_vals = norm_series.values[:, :, epsilon : epsilon + n_blocks * horizon]
    forecast = DDSeries(values=out, path_ids=norm_series.path_ids, dt=norm_series.dt)
    truth = DDSeries(values=truth_vals.copy(), path_ids=norm_series.path_ids, dt=norm_series.dt)
    return forecast, truth


def _denorm_series(series: DDSeries, stats: NormStats) -> DDSeries:
    vals = series.values * stats.std[:, None, None] + stats.mean[:, None, None]
    return DDSeries(values=vals, path_ids=series.path_ids, dt=series.dt)


def stage_eval(
    extract_art: dict,
    train_art: dict,
    pretrain_art: dict,
    out_dir: str | Path,
    budgets: Budgets = Budgets(),
    horizons: tuple[int, ...] = (5, 10),
    scenario_name: str = "scenario",
    speed: float = 0.0,
    only_model: str | None = None,
) -> dict:
    """Score every model on the held-out lanes; write per-cell tables."""
    out_dir = Path(out_dir)
    _, test_ds, stats, raw_test, norm_test = load_extracted(extract_art)
    models = _load_models(train_art, pretrain_art, only_model)
    scenario_kind = scenario_name.rsplit("_", 1)[0]
    report = EvalReport()

    # weights per (lane, path): mean linear power over the lane's test steps
    weight_map: dict[tuple[str, int], float] = {}
    for lane_name, raw in raw_test.items():
        w = intensity_weights(raw.channel("intensity_db"))
        for i, pid in enumerate(raw.path_ids):
            weight_map[(lane_name, int(pid))] = float(w[i])

    for ptype in PARAM_TYPES:
        ds = test_ds.filter_param(ptype)
        keys = list(zip(ds.trace_ids, (int(p) for p in ds.path_ids)))
        uniq_keys = sorted(set(keys))
        truth = denormalize_values(ds.targets, ptype, stats)
        for model_name, per_type in models.items():
            preds_norm = per_type[ptype].predict(ds.contexts, ds.lam)
            preds = denormalize_values(preds_norm, ptype, stats)
            abs_err = np.abs(preds - truth)
            # stack per-path mean errors in key order for the weighted mean
            path_err = []
            path_w = []
            for key in uniq_keys:
                rows = [i for i, k in enumerate(keys) if k == key]
                path_err.append(abs_err[rows].mean())
                path_w.append(weight_map[key])
            wmae = weighted_mae(
                np.asarray(path_err)[:, None],
                np.zeros((len(path_err), 1)),
                np.asarray(path_w),
            )
            report.add_wmae(model_name, scenario_kind, speed, ptype, wmae)
            cap = budgets.cdf_cap
            flat = abs_err.reshape(-1)
            if flat.size > cap:
                step = -(-flat.size // cap)
                flat = flat[::step]
            report.add_cdf_samples(ptype, model_name, flat)

    # horizon path-loss comparison pooled over every test lane, with all
    # horizons scored on the identical forecast-anchor set per lane
    h_max = max(horizons)
    int_idx = PARAM_TYPES.index("intensity_db")
    overlays: dict[str, dict[str, np.ndarray]] = {}
    first_lane = sorted(norm_test)[0]
    for model_name, per_type in models.items():
        errs = [
            horizon_path_loss_errors(
                per_type["intensity_db"],
                norm_test[lane].channel("intensity_db"),
                float(stats.mean[int_idx]),
                float(stats.std[int_idx]),
                budgets.epsilon,
                h_max,
                stride=budgets.eval_stride,
                max_anchors=budgets.horizon_anchors,
            )
            for lane in sorted(norm_test)
        ]
        maes = horizon_mae_from_errors(np.concatenate(errs, axis=0), horizons)
        for h in horizons:
            report.add_horizon(model_name, scenario_kind, speed, h, maes[h])

        # overlay: a contiguous stitched trajectory on the first test lane
        series = norm_test[first_lane]
        seg = min(budgets.overlay_segment, series.n_steps - budgets.epsilon)
        forecast, truth_seg = stitched_forecast(
            per_type, series, budgets.epsilon, h_max, seg
        )
        _, overlay = path_loss_eval(
            _denorm_series(forecast, stats), _denorm_series(truth_seg, stats)
        )
        overlays[model_name] = {
            "t_s": overlay["t_s"],
            "truth_db": overlay["truth_db"],
            "pred_db": overlay["pred_db"],
        }

    paths = {
        "wmae": str(out_dir / "wmae.csv"),
        "cdf": str(out_dir / "cdf.csv"),
        "horizon": str(out_dir / "horizon.csv"),
        "overlay": str(out_dir / "overlay.csv"),
    }
    write_report_csv(paths["wmae"], report)
    write_cdf_csv(paths["cdf"], report)
    write_horizon_csv(paths["horizon"], report)
    write_overlay_csv(paths["overlay"], overlays)
    return {"paths": paths, "scenario": scenario_kind, "speed": speed}


def _read_rows(path: str | Path) -> list[dict]:
    import csv as _csv

    with open(_require(path, "evaluation table")) as fh:
        return list(_csv.DictReader(fh))


def speed_trend_aggregate(wmae_rows: list[dict], stats_by_cell: dict[str, NormStats]) -> list[dict]:
    """Dimensionless per-(model, scenario, speed) score for speed trends.

    Each parameter type's native-unit weighted MAE is divided by that
    type's training std in the 60 km/h cell of the same scenario, then the
    four are averaged, so speeds are compared on a common scale.
    """
    out = []
    combos = sorted(
        {(r["model"], r["scenario"], float(r["speed"])) for r in wmae_rows}
    )
    for model, scenario, speed in combos:
        ref_cell = f"{scenario}_60"
        if ref_cell not in stats_by_cell:
            continue
        ref = stats_by_cell[ref_cell]
        vals = []
        for p, ptype in enumerate(PARAM_TYPES):
            rows = [
                float(r["wmae"])
                for r in wmae_rows
                if r["model"] == model
                and r["scenario"] == scenario
                and float(r["speed"]) == speed
                and r["param"] == ptype
            ]
            if rows:
                vals.append(rows[0] / ref.std[p])
        if len(vals) == len(PARAM_TYPES):
            out.append(
                {"model": model, "scenario": scenario, "speed": speed, "aggregate": float(np.mean(vals))}
            )
    return out


def stage_report(
    cell_arts: dict[str, dict],
    pretrain_art: dict,
    out_dir: str | Path,
    horizons: tuple[int, ...] = (5, 10),
) -> dict:
    """Merge per-cell tables, compute speed-trend aggregates, render SVGs."""
    import csv as _csv

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    wmae_rows: list[dict] = []
    horizon_rows: list[dict] = []
    stats_by_cell: dict[str, NormStats] = {}
    for cell in sorted(cell_arts):
        art = cell_arts[cell]
        wmae_rows.extend(_read_rows(art["eval"]["paths"]["wmae"]))
        horizon_rows.extend(_read_rows(art["eval"]["paths"]["horizon"]))
        with open(_require(art["extract"]["stats"], "stats file")) as fh:
            stats_by_cell[cell] = NormStats.from_dict(json.load(fh))

    report_csv = out_dir / "report.csv"
    with open(report_csv, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["model", "scenario", "speed", "param", "wmae"])
        for r in sorted(
            wmae_rows, key=lambda r: (r["model"], r["scenario"], float(r["speed"]), r["param"])
        ):
            writer.writerow([r["model"], r["scenario"], r["speed"], r["param"], r["wmae"]])

    horizon_csv = out_dir / "horizon.csv"
    with open(horizon_csv, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["model", "scenario", "speed", "horizon", "mae"])
        for r in sorted(
            horizon_rows,
            key=lambda r: (r["model"], r["scenario"], float(r["speed"]), int(r["horizon"])),
        ):
            writer.writerow([r["model"], r["scenario"], r["speed"], r["horizon"], r["mae"]])

    trend_rows = speed_trend_aggregate(wmae_rows, stats_by_cell)
    trend_csv = out_dir / "speed_trend.csv"
    with open(trend_csv, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["model", "scenario", "speed", "aggregate"])
        for r in trend_rows:
            writer.writerow([r["model"], r["scenario"], repr(r["speed"]), repr(r["aggregate"])])

    svgs = _render_figures(cell_arts, pretrain_art, out_dir, horizons)
    return {
        "report": str(report_csv),
        "horizon": str(horizon_csv),
        "speed_trend": str(trend_csv),
        "figures": svgs,
    }


def _render_figures(
    cell_arts: dict[str, dict], pretrain_art: dict, out_dir: Path, horizons: tuple[int, ...]
) -> list[str]:
    import csv as _csv

    svgs: list[str] = []
    first_cell = sorted(cell_arts)[0]

    # training loss curves: pretrain plus the first cell's fine-tunes
    series: dict[str, tuple[list[float], list[float]]] = {}
    with open(pretrain_art["loss_curve"]) as fh:
        rows = list(_csv.DictReader(fh))
        series["pretrain"] = (
            [float(r["step"]) for r in rows],
            [float(r["loss"]) for r in rows],
        )
    for ptype in PARAM_TYPES:
        key = f"transformer_finetuned.{ptype}"
        curve_path = cell_arts[first_cell]["train"]["loss_curves"].get(key)
        if curve_path:
            with open(curve_path) as fh:
                rows = list(_csv.DictReader(fh))
            series[ptype] = (
                [float(r["step"]) for r in rows],
                [float(r["loss"]) for r in rows],
            )
    p = out_dir / "fig_loss.svg"
    svgplot.line_chart(p, series, "Training loss", "step", "loss", log_y=True)
    svgs.append(str(p))

    # error CDFs per parameter type, first cell
    cdf_rows = _read_rows(cell_arts[first_cell]["eval"]["paths"]["cdf"])
    for ptype in PARAM_TYPES:
        per_model: dict[str, tuple[list[float], list[float]]] = {}
        for r in cdf_rows:
            if r["param"] != ptype:
                continue
            per_model.setdefault(r["model"], ([], []))
            per_model[r["model"]][0].append(float(r["error"]))
            per_model[r["model"]][1].append(float(r["fraction"]))
        if per_model:
            p = out_dir / f"fig_cdf_{ptype}.svg"
            svgplot.line_chart(
                p, per_model, f"Error CDF: {ptype} ({first_cell})", "abs error", "fraction"
            )
            svgs.append(str(p))

    # horizon bars per cell
    for cell in sorted(cell_arts):
        rows = _read_rows(cell_arts[cell]["eval"]["paths"]["horizon"])
        cats = sorted({r["model"] for r in rows})
        groups: dict[str, list[float]] = {}
        for h in horizons:
            vals = []
            for model in cats:
                match = [
                    float(r["mae"])
                    for r in rows
                    if r["model"] == model and int(r["horizon"]) == h
                ]
                vals.append(match[0] if match else 0.0)
            groups[f"{h}-step"] = vals
        p = out_dir / f"fig_horizon_{cell}.svg"
        svgplot.bar_chart(p, cats, groups, f"Path-loss MAE by horizon ({cell})", "", "MAE (dB)")
        svgs.append(str(p))

    # path-loss overlay, first cell, truth vs a readable subset of models
    overlay_rows = _read_rows(cell_arts[first_cell]["eval"]["paths"]["overlay"])
    lines: dict[str, tuple[list[float], list[float]]] = {}
    for r in overlay_rows:
        model = r["model"]
        if model not in ("transformer_finetuned", "lstm", "persistence"):
            continue
        lines.setdefault(model, ([], []))
        lines[model][0].append(float(r["t_ms"]))
        lines[model][1].append(float(r["pred_db"]))
        lines.setdefault("truth", ([], []))
        if model == "persistence":
            lines["truth"][0].append(float(r["t_ms"]))
            lines["truth"][1].append(float(r["truth_db"]))
    if lines:
        p = out_dir / "fig_overlay.svg"
        svgplot.line_chart(
            p, lines, f"Reconstructed path loss ({first_cell})", "t (ms)", "path loss (dB)"
        )
        svgs.append(str(p))
    return svgs


def run_cell(
    cell: str,
    out_root: str | Path,
    pretrain_art: dict,
    budgets: Budgets = Budgets(),
    seed: int | None = None,
    horizons: tuple[int, ...] = (5, 10),
    only_model: str | None = None,
) -> dict:
    """Generate-extract-train-eval for one scenario cell."""
    out_root = Path(out_root)
    scenario = resolve_scenario(cell)
    cell_dir = out_root / "cells" / Path(cell).stem
    gen = stage_generate(scenario, cell_dir / "traces", seed, budgets)
    extract = stage_extract(gen, cell_dir / "extract", budgets)
    trained = stage_train(extract, pretrain_art, cell_dir / "train", budgets, only_model)
    evaluated = stage_eval(
        extract,
        trained,
        pretrain_art,
        cell_dir / "eval",
        budgets,
        horizons,
        scenario_name=gen["scenario_name"],
        speed=gen["speed_kmh"],
        only_model=only_model,
    )
    return {"generate": gen, "extract": extract, "train": trained, "eval": evaluated}


def run_reproduce(
    out_root: str | Path,
    cells: tuple[str, ...] = CELLS,
    budgets: Budgets = Budgets(),
    horizons: tuple[int, ...] = (5, 10),
) -> dict:
    """Full pipeline over all cells plus the merged report."""
    out_root = Path(out_root)
    pretrain = stage_pretrain(out_root / "pretrain", budgets)
    cell_arts = {}
    for cell in cells:
        cell_arts[Path(cell).stem] = run_cell(
            cell, out_root, pretrain, budgets, horizons=horizons
        )
    report = stage_report(cell_arts, pretrain, out_root / "report", horizons)
    return {
        "budgets": budgets.as_dict(),
        "cells": {k: v for k, v in cell_arts.items()},
        "pretrain": pretrain,
        "report": report,
        "horizons": list(horizons),
    }
