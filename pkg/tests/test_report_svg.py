"""Report CSV exports and the dependency-free SVG renderer."""

import csv

import numpy as np
import pytest

from ddpredict.cli.svgplot import bar_chart, line_chart
from ddpredict.evaluation.report import (
    EvalReport,
    write_cdf_csv,
    write_horizon_csv,
    write_loss_curve_csv,
    write_overlay_csv,
    write_report_csv,
)


def _report():
    rep = EvalReport()
    rep.add_wmae("lstm", "los", 60.0, "delay_s", 0.5)
    rep.add_wmae("transformer_finetuned", "los", 60.0, "delay_s", 0.25)
    rep.add_wmae("lstm", "nlos", 120.0, "doppler_hz", 3.0)
    rep.add_horizon("lstm", "los", 60.0, 5, 1.0)
    rep.add_horizon("lstm", "los", 60.0, 10, 2.0)
    rep.add_cdf_samples("delay_s", "lstm", np.array([0.1, 0.3, 0.2]))
    return rep


def test_wmae_lookup():
    rep = _report()
    assert rep.wmae_lookup("lstm", "nlos", 120.0, "doppler_hz") == 3.0
    with pytest.raises(KeyError):
        rep.wmae_lookup("gru", "los", 60.0, "delay_s")


def test_report_rejects_negative_scores():
    rep = EvalReport()
    with pytest.raises(ValueError):
        rep.add_wmae("lstm", "los", 60.0, "delay_s", -1.0)
    with pytest.raises(ValueError):
        rep.add_horizon("lstm", "los", 60.0, 5, -0.1)
    with pytest.raises(ValueError):
        rep.add_cdf_samples("delay_s", "lstm", np.array([-0.5]))


def test_cdf_samples_accumulate():
    rep = EvalReport()
    rep.add_cdf_samples("delay_s", "lstm", np.array([1.0]))
    rep.add_cdf_samples("delay_s", "lstm", np.array([2.0, 3.0]))
    assert rep.cdf_samples[("delay_s", "lstm")].shape == (3,)


def test_report_csv_sorted_and_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_report_csv(a, _report())
    write_report_csv(b, _report())
    assert a.read_bytes() == b.read_bytes()
    with open(a) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["model", "scenario", "speed", "param", "wmae"]
    models = [r[0] for r in rows[1:]]
    assert models == sorted(models)
    assert rows[1][2] == "60.0"  # repr formatting


def test_horizon_csv_round_trip(tmp_path):
    path = tmp_path / "h.csv"
    write_horizon_csv(path, _report())
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["model", "scenario", "speed", "horizon", "mae"]
    assert [r[3] for r in rows[1:]] == ["5", "10"]
    assert float(rows[2][4]) == 2.0


def test_cdf_csv_fractions_monotone(tmp_path):
    path = tmp_path / "cdf.csv"
    write_cdf_csv(path, _report())
    with open(path) as fh:
        rows = list(csv.reader(fh))[1:]
    fractions = [float(r[3]) for r in rows]
    assert fractions == sorted(fractions)
    assert fractions[-1] == 1.0
    errors = [float(r[2]) for r in rows]
    assert errors == sorted(errors)


def test_overlay_csv_milliseconds(tmp_path):
    overlays = {
        "lstm": {
            "t_s": np.array([0.0, 5e-4]),
            "truth_db": np.array([80.0, 81.0]),
            "pred_db": np.array([79.5, 80.5]),
        }
    }
    path = tmp_path / "ov.csv"
    write_overlay_csv(path, overlays)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t_ms", "truth_db", "pred_db", "model"]
    assert float(rows[2][0]) == pytest.approx(0.5)
    assert rows[1][3] == "lstm"


def test_loss_curve_csv(tmp_path):
    path = tmp_path / "loss.csv"
    write_loss_curve_csv(path, [1.5, 0.75, 0.5])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "loss"]
    assert rows[1] == ["0", "1.5"]
    assert rows[3] == ["2", "0.5"]


# ---------------------------------------------------------------- SVG


def test_line_chart_writes_valid_svg(tmp_path):
    path = tmp_path / "chart.svg"
    line_chart(
        path,
        {"lstm": ([0, 1, 2], [3.0, 2.0, 1.0]), "gru": ([0, 1, 2], [2.5, 2.0, 1.5])},
        "Loss",
        xlabel="step",
        ylabel="value",
    )
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    assert text.count("<polyline") == 2
    assert "Loss" in text and "lstm" in text


def test_line_chart_log_scale_handles_zero(tmp_path):
    path = tmp_path / "log.svg"
    line_chart(path, {"a": ([0, 1], [0.0, 10.0])}, "t", log_y=True)
    assert "(log10)" in path.read_text()


def test_line_chart_escapes_markup(tmp_path):
    path = tmp_path / "esc.svg"
    line_chart(path, {"a<b": ([0, 1], [1.0, 2.0])}, "x & y")
    text = path.read_text()
    assert "a&lt;b" in text and "x &amp; y" in text
    assert "a<b" not in text


def test_line_chart_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        line_chart(tmp_path / "x.svg", {}, "nothing")


def test_bar_chart_one_bar_per_category_and_group(tmp_path):
    path = tmp_path / "bars.svg"
    bar_chart(
        path,
        ["intensity", "delay"],
        {"lstm": [1.0, 2.0], "gru": [1.5, 0.5]},
        "wMAE",
    )
    text = path.read_text()
    # 2 categories x 2 groups bars, plus frame and 2 legend swatches
    assert text.count("<rect") == 4 + 2 + 2
    assert "intensity" in text and "gru" in text


def test_bar_chart_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for p in (a, b):
        bar_chart(p, ["x"], {"m": [1.0]}, "t")
    assert a.read_bytes() == b.read_bytes()
