"""Throughput comparison: compiled vs numpy recurrence kernels.

Times the LSTM/GRU time-loop kernels (forward and backward) that
dominate recurrent training, at a few batch/length/width points around
the workbench defaults.  Run from the repo root:

    python3 benchmarks/bench_backends.py [--repeats 5]

The compiled backend is imported directly; the numpy fallback is the
reference implementation, so this doubles as an agreement check.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ddpredict.models import _recurrence_np as np_impl

try:
    from ddpredict.models import _recurrence_c as c_impl
except ImportError:
    c_impl = None


CASES = [
    # (batch, steps, hidden) around the training/eval workloads
    (64, 20, 32),
    (64, 30, 32),
    (256, 30, 32),
    (64, 30, 128),
]


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(impl, kind, b, t, h, rng, repeats):
    if kind == "lstm":
        xw = rng.standard_normal((b, t, 4 * h))
        wh = rng.standard_normal((h, 4 * h)) / np.sqrt(h)
        h0 = rng.standard_normal((b, h))
        c0 = rng.standard_normal((b, h))
        h_seq, c_seq, gates = impl.lstm_recurrence(xw, wh, h0, c0)
        dh = rng.standard_normal(h_seq.shape)
        fwd = _time(lambda: impl.lstm_recurrence(xw, wh, h0, c0), repeats)
        bwd = _time(
            lambda: impl.lstm_recurrence_backward(dh, h_seq, c_seq, gates, wh, h0, c0),
            repeats,
        )
    else:
        xw = rng.standard_normal((b, t, 3 * h))
        wh = rng.standard_normal((h, 3 * h)) / np.sqrt(h)
        h0 = rng.standard_normal((b, h))
        h_seq, gates, hh_n = impl.gru_recurrence(xw, wh, h0)
        dh = rng.standard_normal(h_seq.shape)
        fwd = _time(lambda: impl.gru_recurrence(xw, wh, h0), repeats)
        bwd = _time(
            lambda: impl.gru_recurrence_backward(dh, h_seq, gates, hh_n, wh, h0),
            repeats,
        )
    return fwd, bwd


def check_agreement(rng):
    """Max |compiled - numpy| over one forward of each kernel."""
    b, t, h = 8, 12, 16
    xw = rng.standard_normal((b, t, 4 * h))
    wh = rng.standard_normal((h, 4 * h)) / np.sqrt(h)
    h0 = rng.standard_normal((b, h))
    c0 = rng.standard_normal((b, h))
    worst = 0.0
    for a, b_ in zip(np_impl.lstm_recurrence(xw, wh, h0, c0),
                     c_impl.lstm_recurrence(xw, wh, h0, c0)):
        worst = max(worst, float(np.abs(a - b_).max()))
    xw3 = rng.standard_normal((b, t, 3 * h))
    wh3 = rng.standard_normal((h, 3 * h)) / np.sqrt(h)
    for a, b_ in zip(np_impl.gru_recurrence(xw3, wh3, h0),
                     c_impl.gru_recurrence(xw3, wh3, h0)):
        worst = max(worst, float(np.abs(a - b_).max()))
    return worst


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(11)

    if c_impl is None:
        print("compiled backend not available; showing numpy only")
    else:
        print(f"kernel agreement (max abs diff): {check_agreement(rng):.3e}")

    header = f"{'kernel':6s} {'B':>4s} {'T':>3s} {'H':>4s} " \
             f"{'numpy fwd':>11s} {'numpy bwd':>11s}"
    if c_impl is not None:
        header += f" {'comp fwd':>11s} {'comp bwd':>11s} {'speedup':>9s}"
    print(header)
    for kind in ("lstm", "gru"):
        for b, t, h in CASES:
            nf, nb = bench_kernel(np_impl, kind, b, t, h, rng, args.repeats)
            line = f"{kind:6s} {b:4d} {t:3d} {h:4d} {nf*1e3:9.3f}ms {nb*1e3:9.3f}ms"
            if c_impl is not None:
                cf, cb = bench_kernel(c_impl, kind, b, t, h, rng, args.repeats)
                line += (
                    f" {cf*1e3:9.3f}ms {cb*1e3:9.3f}ms"
                    f" {(nf + nb) / (cf + cb):8.2f}x"
                )
            print(line)


if __name__ == "__main__":
    main()
