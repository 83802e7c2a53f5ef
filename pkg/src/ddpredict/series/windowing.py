"""Sliding-window datasets over univariate parameter series.

Each (path, parameter type) series yields independent samples: an
epsilon-step context followed immediately by a lambda-step target.  Dataset
files store the series values once and reference windows by start index.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ddpredict.series.extract import PARAM_TYPES, DDSeries


@dataclass
class WindowedDataset:
    """Context/target window pairs plus their provenance keys."""

    contexts: np.ndarray  # (n, epsilon)
    targets: np.ndarray  # (n, lam)
    trace_ids: list[str]  # (n,)
    path_ids: np.ndarray  # (n,)
    param_types: list[str]  # (n,)
    starts: np.ndarray  # (n,) context start index in the source series
    epsilon: int
    lam: int
    stride: int
    split: str = "train"
    source: str = "channel"

    def __post_init__(self) -> None:
        n = self.contexts.shape[0]
        if self.targets.shape[0] != n or len(self.trace_ids) != n:
            raise ValueError("window arrays disagree on sample count")
        if self.contexts.shape[1] != self.epsilon or self.targets.shape[1] != self.lam:
            raise ValueError("window widths disagree with epsilon/lambda")

    def __len__(self) -> int:
        return self.contexts.shape[0]

    def filter_param(self, param_type: str) -> "WindowedDataset":
        """Subset holding only one parameter type."""
        keep = [i for i, p in enumerate(self.param_types) if p == param_type]
        idx = np.asarray(keep, dtype=int)
        return WindowedDataset(
            contexts=self.contexts[idx],
            targets=self.targets[idx],
            trace_ids=[self.trace_ids[i] for i in keep],
            path_ids=self.path_ids[idx],
            param_types=[self.param_types[i] for i in keep],
            starts=self.starts[idx],
            epsilon=self.epsilon,
            lam=self.lam,
            stride=self.stride,
            split=self.split,
            source=self.source,
        )

    @staticmethod
    def merge(parts: list["WindowedDataset"]) -> "WindowedDataset":
        if not parts:
            raise ValueError("nothing to merge")
        head = parts[0]
        for p in parts[1:]:
            if (p.epsilon, p.lam, p.stride) != (head.epsilon, head.lam, head.stride):
                raise ValueError("window geometry differs between parts")
        return WindowedDataset(
            contexts=np.concatenate([p.contexts for p in parts], axis=0),
            targets=np.concatenate([p.targets for p in parts], axis=0),
            trace_ids=[t for p in parts for t in p.trace_ids],
            path_ids=np.concatenate([p.path_ids for p in parts]),
            param_types=[t for p in parts for t in p.param_types],
            starts=np.concatenate([p.starts for p in parts]),
            epsilon=head.epsilon,
            lam=head.lam,
            stride=head.stride,
            split=head.split,
            source=head.source,
        )


def window(
    series: DDSeries,
    epsilon: int = 20,
    lam: int = 10,
    stride: int = 1,
    trace_id: str = "trace0",
    split: str = "train",
) -> WindowedDataset:
    """Cut every univariate (path, type) series into context/target pairs.

    Start indices are 0, stride, 2*stride, ... while the context plus
    target still fits; stride 1 therefore covers every admissible start.
    """
    if epsilon < 1 or lam < 1 or stride < 1:
        raise ValueError("epsilon, lambda, stride must be positive")
    total = epsilon + lam
    if series.n_steps < total:
        raise ValueError(
            f"series length {series.n_steps} < window {epsilon}+{lam}"
        )
    starts = np.arange(0, series.n_steps - total + 1, stride)
    contexts, targets, trace_ids, path_ids, param_types, start_col = [], [], [], [], [], []
    for p, ptype in enumerate(PARAM_TYPES):
        for i, pid in enumerate(series.path_ids):
            univariate = series.values[p, i]
            for s in starts:
                contexts.append(univariate[s : s + epsilon])
                targets.append(univariate[s + epsilon : s + total])
                trace_ids.append(trace_id)
                path_ids.append(int(pid))
                param_types.append(ptype)
                start_col.append(int(s))
    return WindowedDataset(
        contexts=np.asarray(contexts),
        targets=np.asarray(targets),
        trace_ids=trace_ids,
        path_ids=np.asarray(path_ids, dtype=int),
        param_types=param_types,
        starts=np.asarray(start_col, dtype=int),
        epsilon=epsilon,
        lam=lam,
        stride=stride,
        split=split,
    )


SERIES_HEADER = ["trace_id", "path_id", "param_type", "t_index", "value"]
WINDOW_HEADER = ["trace_id", "path_id", "param_type", "start"]


def write_series(path: str | Path, series_by_trace: dict[str, DDSeries]) -> None:
    """Write one or more parameter series as long-format delimited text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dts = {s.dt for s in series_by_trace.values()}
    if len(dts) != 1:
        raise ValueError("all series in one file must share a step interval")
    with open(path, "w", newline="") as fh:
        fh.write(f"# dt={repr(float(next(iter(dts))))}\n")
        writer = csv.writer(fh)
        writer.writerow(SERIES_HEADER)
        for trace_id in sorted(series_by_trace):
            series = series_by_trace[trace_id]
            for p, ptype in enumerate(PARAM_TYPES):
                for i, pid in enumerate(series.path_ids):
                    for t in range(series.n_steps):
                        writer.writerow(
                            [trace_id, int(pid), ptype, t, repr(float(series.values[p, i, t]))]
                        )


def read_series(path: str | Path) -> dict[str, DDSeries]:
    """Read series written by :func:`write_series`."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# dt="):
            raise ValueError(f"missing dt header in {path}")
        dt = float(first[len("# dt=") :])
        reader = csv.reader(fh)
        header = next(reader)
        if header != SERIES_HEADER:
            raise ValueError(f"unexpected series header {header!r} in {path}")
        rows: dict[str, dict[tuple[int, str], dict[int, float]]] = {}
        for trace_id, pid, ptype, t, value in reader:
            rows.setdefault(trace_id, {}).setdefault((int(pid), ptype), {})[int(t)] = float(value)
    out: dict[str, DDSeries] = {}
    for trace_id, cells in rows.items():
        pids = sorted({pid for pid, _ in cells})
        n_steps = len(next(iter(cells.values())))
        values = np.empty((len(PARAM_TYPES), len(pids), n_steps))
        for p, ptype in enumerate(PARAM_TYPES):
            for i, pid in enumerate(pids):
                col = cells[(pid, ptype)]
                if len(col) != n_steps:
                    raise ValueError(f"ragged series for {trace_id}/{pid}/{ptype}")
                for t, v in col.items():
                    values[p, i, t] = v
        out[trace_id] = DDSeries(values=values, path_ids=np.asarray(pids), dt=dt)
    return out


def write_windows(path: str | Path, dataset: WindowedDataset) -> None:
    """Write a window index file; values live in the series file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(
            f"# epsilon={dataset.epsilon} lambda={dataset.lam} "
            f"stride={dataset.stride} split={dataset.split}\n"
        )
        writer = csv.writer(fh)
        writer.writerow(WINDOW_HEADER)
        for i in range(len(dataset)):
            writer.writerow(
                [
                    dataset.trace_ids[i],
                    int(dataset.path_ids[i]),
                    dataset.param_types[i],
                    int(dataset.starts[i]),
                ]
            )


def read_windows(path: str | Path, series_by_trace: dict[str, DDSeries]) -> WindowedDataset:
    """Materialize a window index against its series values."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# "):
            raise ValueError(f"missing geometry header in {path}")
        meta = dict(kv.split("=") for kv in first[2:].split())
        epsilon = int(meta["epsilon"])
        lam = int(meta["lambda"])
        stride = int(meta["stride"])
        split = meta.get("split", "train")
        reader = csv.reader(fh)
        header = next(reader)
        if header != WINDOW_HEADER:
            raise ValueError(f"unexpected window header {header!r} in {path}")
        contexts, targets, trace_ids, path_ids, param_types, starts = [], [], [], [], [], []
        for trace_id, pid, ptype, start in reader:
            series = series_by_trace[trace_id]
            i = int(np.where(series.path_ids == int(pid))[0][0])
            p = PARAM_TYPES.index(ptype)
            s = int(start)
            univariate = series.values[p, i]
            contexts.append(univariate[s : s + epsilon])
            targets.append(univariate[s + epsilon : s + epsilon + lam])
            trace_ids.append(trace_id)
            path_ids.append(int(pid))
            param_types.append(ptype)
            starts.append(s)
    return WindowedDataset(
        contexts=np.asarray(contexts),
        targets=np.asarray(targets),
        trace_ids=trace_ids,
        path_ids=np.asarray(path_ids, dtype=int),
        param_types=param_types,
        starts=np.asarray(starts, dtype=int),
        epsilon=epsilon,
        lam=lam,
        stride=stride,
        split=split,
    )
