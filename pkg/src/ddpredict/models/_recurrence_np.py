"""Pure-numpy recurrence kernels for the gated baselines.

The time loop is inherently sequential; everything inside one step is
vectorized over the batch.  Input projections (x_t W_x + b) are precomputed
by the caller and passed as ``xw``, so these kernels only carry the hidden
state through time.  A compiled twin with identical contracts lives in
``_recurrence_c``; ``backend`` picks one at import.

Shapes: B batch, T steps, H hidden width.  LSTM gate order [i, f, g, o]
along the last axis of ``xw`` (B, T, 4H); GRU order [r, z, n] in (B, T, 3H).
"""

from __future__ import annotations

import numpy as np


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_recurrence(
    xw: np.ndarray, wh: np.ndarray, h0: np.ndarray, c0: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run an LSTM over time.

    Returns (h_seq (B,T,H), c_seq (B,T,H), gates (B,T,4H)); gates hold the
    post-nonlinearity activations needed by the backward pass.
    """
    b, t_steps, four_h = xw.shape
    h = four_h // 4
    h_seq = np.empty((b, t_steps, h))
    c_seq = np.empty((b, t_steps, h))
    gates = np.empty((b, t_steps, four_h))
    h_prev = h0
    c_prev = c0
    for t in range(t_steps):
        a = xw[:, t, :] + h_prev @ wh
        i = _sigmoid(a[:, :h])
        f = _sigmoid(a[:, h : 2 * h])
        g = np.tanh(a[:, 2 * h : 3 * h])
        o = _sigmoid(a[:, 3 * h :])
        c_prev = f * c_prev + i * g
        h_prev = o * np.tanh(c_prev)
        gates[:, t, :h] = i
        gates[:, t, h : 2 * h] = f
        gates[:, t, 2 * h : 3 * h] = g
        gates[:, t, 3 * h :] = o
        h_seq[:, t, :] = h_prev
        c_seq[:, t, :] = c_prev
    return h_seq, c_seq, gates


def lstm_recurrence_backward(
    dh_seq: np.ndarray,
    h_seq: np.ndarray,
    c_seq: np.ndarray,
    gates: np.ndarray,
    wh: np.ndarray,
    h0: np.ndarray,
    c0: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Backpropagate through :func:`lstm_recurrence`.

    ``dh_seq`` is dLoss/dh at every step (zero rows where unused).
    Returns (dxw, dwh, dh0, dc0).
    """
    b, t_steps, h = h_seq.shape
    dxw = np.empty((b, t_steps, 4 * h))
    dwh = np.zeros_like(wh)
    dh_next = np.zeros((b, h))
    dc_next = np.zeros((b, h))
    for t in range(t_steps - 1, -1, -1):
        i = gates[:, t, :h]
        f = gates[:, t, h : 2 * h]
        g = gates[:, t, 2 * h : 3 * h]
        o = gates[:, t, 3 * h :]
        c = c_seq[:, t, :]
        c_prev = c_seq[:, t - 1, :] if t > 0 else c0
        h_prev = h_seq[:, t - 1, :] if t > 0 else h0
        tc = np.tanh(c)
        dh = dh_seq[:, t, :] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        da = np.empty((b, 4 * h))
        da[:, :h] = dc * g * i * (1.0 - i)
        da[:, h : 2 * h] = dc * c_prev * f * (1.0 - f)
        da[:, 2 * h : 3 * h] = dc * i * (1.0 - g * g)
        da[:, 3 * h :] = dh * tc * o * (1.0 - o)
        dxw[:, t, :] = da
        dwh += h_prev.T @ da
        dh_next = da @ wh.T
        dc_next = dc * f
    return dxw, dwh, dh_next, dc_next


def gru_recurrence(
    xw: np.ndarray, wh: np.ndarray, h0: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run a GRU over time.

    The candidate pre-activation uses the gated hidden projection
    a_n = xw_n + r * (h_prev @ wh_n).  Returns (h_seq, gates (B,T,3H) with
    [r, z, n] activations, hh_n cache (B,T,H) holding h_prev @ wh_n).
    """
    b, t_steps, three_h = xw.shape
    h = three_h // 3
    h_seq = np.empty((b, t_steps, h))
    gates = np.empty((b, t_steps, three_h))
    hh_n_cache = np.empty((b, t_steps, h))
    h_prev = h0
    for t in range(t_steps):
        hw = h_prev @ wh  # (B, 3H)
        r = _sigmoid(xw[:, t, :h] + hw[:, :h])
        z = _sigmoid(xw[:, t, h : 2 * h] + hw[:, h : 2 * h])
        hh_n = hw[:, 2 * h :]
        n = np.tanh(xw[:, t, 2 * h :] + r * hh_n)
        h_prev = (1.0 - z) * n + z * h_prev
        gates[:, t, :h] = r
        gates[:, t, h : 2 * h] = z
        gates[:, t, 2 * h :] = n
        hh_n_cache[:, t, :] = hh_n
        h_seq[:, t, :] = h_prev
    return h_seq, gates, hh_n_cache


def gru_recurrence_backward(
    dh_seq: np.ndarray,
    h_seq: np.ndarray,
    gates: np.ndarray,
    hh_n_cache: np.ndarray,
    wh: np.ndarray,
    h0: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Backpropagate through :func:`gru_recurrence`; returns (dxw, dwh, dh0)."""
    b, t_steps, h = h_seq.shape
    dxw = np.empty((b, t_steps, 3 * h))
    dwh = np.zeros_like(wh)
    dh_next = np.zeros((b, h))
    for t in range(t_steps - 1, -1, -1):
        r = gates[:, t, :h]
        z = gates[:, t, h : 2 * h]
        n = gates[:, t, 2 * h :]
        hh_n = hh_n_cache[:, t, :]
        h_prev = h_seq[:, t - 1, :] if t > 0 else h0
        dh = dh_seq[:, t, :] + dh_next
        dz = dh * (h_prev - n)
        dn = dh * (1.0 - z)
        da_n = dn * (1.0 - n * n)
        da_r = da_n * hh_n * r * (1.0 - r)
        da_z = dz * z * (1.0 - z)
        dhh_n = da_n * r
        dxw[:, t, :h] = da_r
        dxw[:, t, h : 2 * h] = da_z
        dxw[:, t, 2 * h :] = da_n
        dhw = np.concatenate([da_r, da_z, dhh_n], axis=1)  # grads w.r.t. h_prev @ wh
        dwh += h_prev.T @ dhw
        dh_next = dh * z + dhw @ wh.T
    return dxw, dwh, dh_next
