"""Minimal SVG charts: polylines and grouped bars, no dependencies.

CSV files are the authoritative outputs; these renderings exist so a run
can be eyeballed without extra tooling.
"""

from __future__ import annotations

import math
from pathlib import Path

WIDTH = 640
HEIGHT = 400
MARGIN_L = 70
MARGIN_R = 20
MARGIN_T = 40
MARGIN_B = 50

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * step:
        ticks.append(v)
        v += step
    return ticks


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str) -> None:
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">{_esc(xlabel)}</text>',
            f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" '
            f'transform="rotate(-90 15 {HEIGHT / 2})">{_esc(ylabel)}</text>',
        ]

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"])


def _data_rect() -> tuple[float, float, float, float]:
    return MARGIN_L, MARGIN_T, WIDTH - MARGIN_R, HEIGHT - MARGIN_B


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo if hi > lo else 1.0

    def f(v: float) -> float:
        return a + (v - lo) / span * (b - a)

    return f


def line_chart(
    path: str | Path,
    series: dict[str, tuple[list[float], list[float]]],
    title: str,
    xlabel: str = "",
    ylabel: str = "",
    log_y: bool = False,
) -> None:
    """Write a polyline chart; ``series`` maps label -> (x values, y values)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x0, y0, x1, y1 = _data_rect()
    xs = [v for vals, _ in series.values() for v in vals]
    ys = [v for _, vals in series.values() for v in vals]
    if log_y:
        ys = [math.log10(max(v, 1e-300)) for v in ys]
    if not xs:
        raise ValueError("nothing to plot")
    sx = _scale(min(xs), max(xs), x0, x1)
    sy = _scale(min(ys), max(ys), y1, y0)

    canvas = _Canvas(title, xlabel, ylabel + (" (log10)" if log_y else ""))
    canvas.parts.append(
        f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" '
        f'fill="none" stroke="#999"/>'
    )
    for tick in _nice_ticks(min(xs), max(xs)):
        px = sx(tick)
        canvas.parts.append(f'<line x1="{px:.1f}" y1="{y1}" x2="{px:.1f}" y2="{y1 + 4}" stroke="#999"/>')
        canvas.parts.append(
            f'<text x="{px:.1f}" y="{y1 + 18}" text-anchor="middle">{tick:g}</text>'
        )
    for tick in _nice_ticks(min(ys), max(ys)):
        py = sy(tick)
        canvas.parts.append(f'<line x1="{x0 - 4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="#999"/>')
        canvas.parts.append(
            f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end">{tick:g}</text>'
        )
    for idx, (label, (xv, yv)) in enumerate(sorted(series.items())):
        color = PALETTE[idx % len(PALETTE)]
        if log_y:
            yv = [math.log10(max(v, 1e-300)) for v in yv]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xv, yv))
        canvas.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = MARGIN_T + 14 * idx + 10
        canvas.parts.append(
            f'<line x1="{x1 - 130}" y1="{ly - 4}" x2="{x1 - 110}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        canvas.parts.append(f'<text x="{x1 - 105}" y="{ly}">{_esc(label)}</text>')
    path.write_text(canvas.finish())


def bar_chart(
    path: str | Path,
    categories: list[str],
    groups: dict[str, list[float]],
    title: str,
    xlabel: str = "",
    ylabel: str = "",
) -> None:
    """Grouped vertical bars; ``groups`` maps label -> one value per category."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x0, y0, x1, y1 = _data_rect()
    all_vals = [v for vals in groups.values() for v in vals]
    hi = max(all_vals + [0.0])
    sy = _scale(0.0, hi, y1, y0)

    canvas = _Canvas(title, xlabel, ylabel)
    canvas.parts.append(
        f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="none" stroke="#999"/>'
    )
    for tick in _nice_ticks(0.0, hi):
        py = sy(tick)
        canvas.parts.append(f'<line x1="{x0 - 4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="#999"/>')
        canvas.parts.append(f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end">{tick:g}</text>')
    n_cat = len(categories)
    n_grp = len(groups)
    slot = (x1 - x0) / max(n_cat, 1)
    bar_w = slot * 0.8 / max(n_grp, 1)
    for ci, cat in enumerate(categories):
        cx = x0 + slot * (ci + 0.5)
        canvas.parts.append(
            f'<text x="{cx:.1f}" y="{y1 + 18}" text-anchor="middle">{_esc(cat)}</text>'
        )
        for gi, (label, vals) in enumerate(sorted(groups.items())):
            color = PALETTE[gi % len(PALETTE)]
            bx = cx - slot * 0.4 + gi * bar_w
            by = sy(vals[ci])
            canvas.parts.append(
                f'<rect x="{bx:.1f}" y="{by:.1f}" width="{bar_w:.1f}" '
                f'height="{y1 - by:.1f}" fill="{color}"/>'
            )
    for gi, label in enumerate(sorted(groups)):
        color = PALETTE[gi % len(PALETTE)]
        ly = MARGIN_T + 14 * gi + 10
        canvas.parts.append(f'<rect x="{x1 - 130}" y="{ly - 10}" width="12" height="8" fill="{color}"/>')
        canvas.parts.append(f'<text x="{x1 - 112}" y="{ly}">{_esc(label)}</text>')
    path.write_text(canvas.finish())
