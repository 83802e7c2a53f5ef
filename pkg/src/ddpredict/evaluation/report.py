"""Evaluation report container and its delimited-text exports.

Rows are sorted before writing so identical inputs always produce
byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class EvalReport:
    """Collected scores for one experiment run.

    wmae_rows: (model, scenario, speed, param) -> weighted MAE, native units.
    horizon_rows: (model, scenario, speed, horizon) -> path-loss MAE dB.
    cdf_samples: (param, model) -> absolute error samples.
    """

    wmae_rows: list[dict] = field(default_factory=list)
    horizon_rows: list[dict] = field(default_factory=list)
    cdf_samples: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def add_wmae(self, model: str, scenario: str, speed: float, param: str, wmae: float) -> None:
        if wmae < 0:
            raise ValueError("errors must be non-negative")
        self.wmae_rows.append(
            {"model": model, "scenario": scenario, "speed": speed, "param": param, "wmae": wmae}
        )

    def add_horizon(self, model: str, scenario: str, speed: float, horizon: int, mae: float) -> None:
        if mae < 0:
            raise ValueError("errors must be non-negative")
        self.horizon_rows.append(
            {"model": model, "scenario": scenario, "speed": speed, "horizon": horizon, "mae": mae}
        )

    def add_cdf_samples(self, param: str, model: str, abs_errors: np.ndarray) -> None:
        errors = np.asarray(abs_errors, dtype=float).reshape(-1)
        if np.any(errors < 0):
            raise ValueError("errors must be non-negative")
        key = (param, model)
        if key in self.cdf_samples:
            errors = np.concatenate([self.cdf_samples[key], errors])
        self.cdf_samples[key] = errors

    def wmae_lookup(self, model: str, scenario: str, speed: float, param: str) -> float:
        for row in self.wmae_rows:
            if (
                row["model"] == model
                and row["scenario"] == scenario
                and row["speed"] == speed
                and row["param"] == param
            ):
                return row["wmae"]
        raise KeyError((model, scenario, speed, param))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report_csv(path: str | Path, report: EvalReport) -> None:
    """Weighted-MAE table: model,scenario,speed,param,wmae."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(
        report.wmae_rows,
        key=lambda r: (r["model"], r["scenario"], r["speed"], r["param"]),
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "scenario", "speed", "param", "wmae"])
        for r in rows:
            writer.writerow([r["model"], r["scenario"], _fmt(r["speed"]), r["param"], _fmt(r["wmae"])])


def write_cdf_csv(path: str | Path, report: EvalReport) -> None:
    """Error CDF samples: param,model,error,fraction."""
    from ddpredict.evaluation.metrics import error_cdf

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "model", "error", "fraction"])
        for (param, model) in sorted(report.cdf_samples):
            values, fractions = error_cdf(report.cdf_samples[(param, model)])
            for v, f in zip(values, fractions):
                writer.writerow([param, model, _fmt(v), _fmt(f)])


def write_overlay_csv(
    path: str | Path, overlays: dict[str, dict[str, np.ndarray]]
) -> None:
    """Path-loss overlay traces: t_ms,truth_db,pred_db,model.

    ``overlays`` maps model name to {t_s, truth_db, pred_db} arrays.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ms", "truth_db", "pred_db", "model"])
        for model in sorted(overlays):
            ov = overlays[model]
            for t, tr, pr in zip(ov["t_s"], ov["truth_db"], ov["pred_db"]):
                writer.writerow([_fmt(t * 1e3), _fmt(tr), _fmt(pr), model])


def write_horizon_csv(path: str | Path, report: EvalReport) -> None:
    """Horizon table: model,scenario,speed,horizon,mae."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(
        report.horizon_rows,
        key=lambda r: (r["model"], r["scenario"], r["speed"], r["horizon"]),
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "scenario", "speed", "horizon", "mae"])
        for r in rows:
            writer.writerow(
                [r["model"], r["scenario"], _fmt(r["speed"]), str(r["horizon"]), _fmt(r["mae"])]
            )


def write_loss_curve_csv(path: str | Path, curve: list[float]) -> None:
    """Training loss per step: step,loss."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss"])
        for step, loss in enumerate(curve):
            writer.writerow([str(step), _fmt(loss)])
