"""Decoder-only transformer over tokenized univariate series.

The input sequence is segmented into length-J tokens; each token is
embedded, combined with a learned per-position vector, and run through
pre-normalization causal self-attention blocks.  Position u's output token
is the prediction for token u+1.  Forward and backward passes are written
out explicitly in numpy so every gradient can be checked against finite
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ddpredict.errors import NumericalError

LN_EPS = 1e-5
_GELU_C0 = math.sqrt(2.0 / math.pi)
_GELU_C1 = 0.044715


@dataclass(frozen=True)
class TokenizerConfig:
    """Segmentation of a length U*J series into U tokens of J values."""

    segment_len: int
    n_tokens: int

    def __post_init__(self) -> None:
        if self.segment_len < 1:
            raise ValueError("segment length must be >= 1")
        if self.n_tokens < 2:
            raise ValueError("need at least 2 tokens")

    @property
    def context_len(self) -> int:
        return self.segment_len * self.n_tokens


@dataclass(frozen=True)
class TransformerConfig:
    """Model geometry; defaults are desk-scale, not the full-size setting."""

    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 4
    d_ff: int = 128
    segment_len: int = 5
    max_tokens: int = 16

    def __post_init__(self) -> None:
        for name in ("d_model", "n_layers", "n_heads", "d_ff", "segment_len", "max_tokens"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.d_model % self.n_heads != 0:
            raise ValueError("d_model must be divisible by n_heads")

    @property
    def d_head(self) -> int:
        return self.d_model // self.n_heads

    def as_dict(self) -> dict:
        return {
            "d_model": self.d_model,
            "n_layers": self.n_layers,
            "n_heads": self.n_heads,
            "d_ff": self.d_ff,
            "segment_len": self.segment_len,
            "max_tokens": self.max_tokens,
        }


def tokenize(x: np.ndarray, segment_len: int) -> np.ndarray:
    """Cut the last axis into consecutive length-J segments.

    (..., U*J) -> (..., U, J); concatenating the tokens back reproduces the
    input exactly.
    """
    x = np.asarray(x)
    if x.shape[-1] % segment_len != 0:
        raise ValueError(
            f"length {x.shape[-1]} not divisible by segment length {segment_len}"
        )
    return x.reshape(*x.shape[:-1], x.shape[-1] // segment_len, segment_len)


def detokenize(tokens: np.ndarray) -> np.ndarray:
    """Inverse of :func:`tokenize`."""
    tokens = np.asarray(tokens)
    return tokens.reshape(*tokens.shape[:-2], tokens.shape[-2] * tokens.shape[-1])


def param_order(config: TransformerConfig) -> list[str]:
    """Canonical tensor order, shared by init, updates, and checkpoints."""
    names = ["w_embed", "te"]
    for layer in range(config.n_layers):
        names += [
            f"ln1_g.{layer}",
            f"ln1_b.{layer}",
            f"wq.{layer}",
            f"wk.{layer}",
            f"wv.{layer}",
            f"wo.{layer}",
            f"ln2_g.{layer}",
            f"ln2_b.{layer}",
            f"w_ff1.{layer}",
            f"b_ff1.{layer}",
            f"w_ff2.{layer}",
            f"b_ff2.{layer}",
        ]
    names += ["lnf_g", "lnf_b", "w_decode"]
    return names


def init_params(config: TransformerConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Fresh parameters: normal(0, 0.02) weights, unit norm gains, zero biases.

    Attention projections are bias-free, so zero input gives zero output.
    """
    d, f, j = config.d_model, config.d_ff, config.segment_len
    scale = 0.02
    params: dict[str, np.ndarray] = {}
    params["w_embed"] = rng.normal(0.0, scale, (j, d))
    params["te"] = rng.normal(0.0, scale, (config.max_tokens, d))
    for layer in range(config.n_layers):
        params[f"ln1_g.{layer}"] = np.ones(d)
        params[f"ln1_b.{layer}"] = np.zeros(d)
        for name in ("wq", "wk", "wv", "wo"):
            params[f"{name}.{layer}"] = rng.normal(0.0, scale, (d, d))
        params[f"ln2_g.{layer}"] = np.ones(d)
        params[f"ln2_b.{layer}"] = np.zeros(d)
        params[f"w_ff1.{layer}"] = rng.normal(0.0, scale, (d, f))
        params[f"b_ff1.{layer}"] = np.zeros(f)
        params[f"w_ff2.{layer}"] = rng.normal(0.0, scale, (f, d))
        params[f"b_ff2.{layer}"] = np.zeros(d)
    params["lnf_g"] = np.ones(d)
    params["lnf_b"] = np.zeros(d)
    params["w_decode"] = rng.normal(0.0, scale, (d, j))
    return params


def _layer_norm_fwd(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = np.mean(xc * xc, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv, g)


def _layer_norm_bwd(dy, cache):
    xhat, inv, g = cache
    axes = tuple(range(dy.ndim - 1))
    dg = np.sum(dy * xhat, axis=axes)
    db = np.sum(dy, axis=axes)
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * np.mean(dxhat * xhat, axis=-1, keepdims=True)
    )
    return dx, dg, db


def _gelu_fwd(x):
    u = _GELU_C0 * (x + _GELU_C1 * x**3)
    th = np.tanh(u)
    return 0.5 * x * (1.0 + th), th


def _gelu_bwd(dy, x, th):
    du = _GELU_C0 * (1.0 + 3.0 * _GELU_C1 * x * x)
    return dy * (0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du)


def _causal_mask(u: int) -> np.ndarray:
    mask = np.zeros((u, u))
    mask[np.triu_indices(u, k=1)] = -np.inf
    return mask


def _softmax_last(scores: np.ndarray) -> np.ndarray:
    m = np.max(scores, axis=-1, keepdims=True)
    e = np.exp(scores - m)
    return e / e.sum(axis=-1, keepdims=True)


def attention(q: np.ndarray, k: np.ndarray, v: np.ndarray, causal: bool = False) -> np.ndarray:
    """Scaled dot-product attention softmax(QK^T/sqrt(d_k))V.

    Masked (future) positions get exactly zero weight when ``causal``.
    Accepts (..., U, d) stacks.
    """
    q = np.asarray(q, dtype=float)
    k = np.asarray(k, dtype=float)
    v = np.asarray(v, dtype=float)
    if q.shape[-1] != k.shape[-1]:
        raise ValueError("query/key inner dimensions differ")
    if k.shape[-2] != v.shape[-2]:
        raise ValueError("key/value row counts differ")
    scores = q @ np.swapaxes(k, -1, -2) / math.sqrt(q.shape[-1])
    if causal:
        if q.shape[-2] != k.shape[-2]:
            raise ValueError("causal mask needs square score matrices")
        scores = scores + _causal_mask(q.shape[-2])
    return _softmax_last(scores) @ v


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    b, u, d = x.shape
    return x.reshape(b, u, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, c, u, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, u, c * dh)


def _multi_head_fwd(x, wq, wk, wv, wo, n_heads, causal=True):
    qh = _split_heads(x @ wq, n_heads)
    kh = _split_heads(x @ wk, n_heads)
    vh = _split_heads(x @ wv, n_heads)
    scores = qh @ np.swapaxes(kh, -1, -2) / math.sqrt(qh.shape[-1])
    if causal:
        scores = scores + _causal_mask(x.shape[1])
    p = _softmax_last(scores)
    merged = _merge_heads(p @ vh)
    return merged @ wo, (x, qh, kh, vh, p, merged)


def _multi_head_bwd(dout, cache, wq, wk, wv, wo):
    x, qh, kh, vh, p, merged = cache
    b, u, d = x.shape
    n_heads = qh.shape[1]
    scale = 1.0 / math.sqrt(qh.shape[-1])

    dwo = merged.reshape(-1, d).T @ dout.reshape(-1, d)
    dmerged = dout @ wo.T
    doh = _split_heads(dmerged, n_heads)
    dp = doh @ np.swapaxes(vh, -1, -2)
    dvh = np.swapaxes(p, -1, -2) @ doh
    ds = (dp - np.sum(dp * p, axis=-1, keepdims=True)) * p
    dqh = ds @ kh * scale
    dkh = np.swapaxes(ds, -1, -2) @ qh * scale

    dq = _merge_heads(dqh)
    dk = _merge_heads(dkh)
    dv = _merge_heads(dvh)
    x2 = x.reshape(-1, d)
    dwq = x2.T @ dq.reshape(-1, d)
    dwk = x2.T @ dk.reshape(-1, d)
    dwv = x2.T @ dv.reshape(-1, d)
    dx = dq @ wq.T + dk @ wk.T + dv @ wv.T
    return dx, dwq, dwk, dwv, dwo


def multi_head(
    x: np.ndarray,
    wq: np.ndarray,
    wk: np.ndarray,
    wv: np.ndarray,
    wo: np.ndarray,
    n_heads: int,
    causal: bool = True,
) -> np.ndarray:
    """Multi-head attention Concat(head_c) W^O over (B, U, D) inputs.

    Head c uses the c-th column block of each projection matrix.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 3:
        raise ValueError("input must be (batch, tokens, d_model)")
    d = x.shape[-1]
    if d % n_heads != 0:
        raise ValueError("d_model must be divisible by n_heads")
    for name, w in (("wq", wq), ("wk", wk), ("wv", wv), ("wo", wo)):
        if w.shape != (d, d):
            raise ValueError(f"{name} must be ({d}, {d})")
    out, _ = _multi_head_fwd(x, wq, wk, wv, wo, n_heads, causal)
    return out


def forward(
    params: dict[str, np.ndarray], tokens: np.ndarray, config: TransformerConfig
) -> tuple[np.ndarray, dict]:
    """Predict the next token at every position.

    tokens (B, U, J) -> predictions (B, U, J) where output u estimates
    token u+1 and depends only on tokens 1..u.
    """
    tokens = np.asarray(tokens, dtype=float)
    if tokens.ndim != 3 or tokens.shape[-1] != config.segment_len:
        raise ValueError(f"tokens must be (B, U, {config.segment_len})")
    u = tokens.shape[1]
    if u < 2:
        raise ValueError("need at least 2 tokens")
    if u > config.max_tokens:
        raise ValueError(f"{u} tokens exceed max_tokens={config.max_tokens}")

    z = tokens @ params["w_embed"] + params["te"][:u]
    layers = []
    for layer in range(config.n_layers):
        lc: dict = {"x_attn_in": z}
        xh1, ln1c = _layer_norm_fwd(z, params[f"ln1_g.{layer}"], params[f"ln1_b.{layer}"])
        attn_out, ac = _multi_head_fwd(
            xh1,
            params[f"wq.{layer}"],
            params[f"wk.{layer}"],
            params[f"wv.{layer}"],
            params[f"wo.{layer}"],
            config.n_heads,
        )
        z = z + attn_out
        lc["ln1"] = ln1c
        lc["attn"] = ac
        lc["x_ff_in"] = z
        xh2, ln2c = _layer_norm_fwd(z, params[f"ln2_g.{layer}"], params[f"ln2_b.{layer}"])
        a1 = xh2 @ params[f"w_ff1.{layer}"] + params[f"b_ff1.{layer}"]
        h1, th = _gelu_fwd(a1)
        z = z + h1 @ params[f"w_ff2.{layer}"] + params[f"b_ff2.{layer}"]
        lc["ln2"] = ln2c
        lc["xh2"] = xh2
        lc["a1"] = a1
        lc["th"] = th
        lc["h1"] = h1
        if not np.all(np.isfinite(z)):
            raise NumericalError(f"non-finite activations after block {layer}")
        layers.append(lc)
    hf, lnfc = _layer_norm_fwd(z, params["lnf_g"], params["lnf_b"])
    preds = hf @ params["w_decode"]
    if not np.all(np.isfinite(preds)):
        raise NumericalError("non-finite predictions after decode projection")
    cache = {"tokens": tokens, "layers": layers, "lnf": lnfc, "hf": hf, "u": u}
    return preds, cache


def backward(
    params: dict[str, np.ndarray],
    cache: dict,
    dpreds: np.ndarray,
    config: TransformerConfig,
) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss given d(loss)/d(predictions)."""
    tokens = cache["tokens"]
    u = cache["u"]
    d = config.d_model
    grads: dict[str, np.ndarray] = {}

    hf2 = cache["hf"].reshape(-1, d)
    grads["w_decode"] = hf2.T @ dpreds.reshape(-1, config.segment_len)
    dhf = dpreds @ params["w_decode"].T
    dz, grads["lnf_g"], grads["lnf_b"] = _layer_norm_bwd(dhf, cache["lnf"])

    for layer in range(config.n_layers - 1, -1, -1):
        lc = cache["layers"][layer]
        # feed-forward branch
        dff = dz
        grads[f"b_ff2.{layer}"] = dff.sum(axis=(0, 1))
        grads[f"w_ff2.{layer}"] = lc["h1"].reshape(-1, config.d_ff).T @ dff.reshape(-1, d)
        dh1 = dff @ params[f"w_ff2.{layer}"].T
        da1 = _gelu_bwd(dh1, lc["a1"], lc["th"])
        grads[f"b_ff1.{layer}"] = da1.sum(axis=(0, 1))
        grads[f"w_ff1.{layer}"] = lc["xh2"].reshape(-1, d).T @ da1.reshape(-1, config.d_ff)
        dxh2 = da1 @ params[f"w_ff1.{layer}"].T
        dx_ln2, grads[f"ln2_g.{layer}"], grads[f"ln2_b.{layer}"] = _layer_norm_bwd(
            dxh2, lc["ln2"]
        )
        dz = dz + dx_ln2
        # attention branch
        dattn = dz
        dxh1, dwq, dwk, dwv, dwo = _multi_head_bwd(
            dattn,
            lc["attn"],
            params[f"wq.{layer}"],
            params[f"wk.{layer}"],
            params[f"wv.{layer}"],
            params[f"wo.{layer}"],
        )
        grads[f"wq.{layer}"] = dwq
        grads[f"wk.{layer}"] = dwk
        grads[f"wv.{layer}"] = dwv
        grads[f"wo.{layer}"] = dwo
        dx_ln1, grads[f"ln1_g.{layer}"], grads[f"ln1_b.{layer}"] = _layer_norm_bwd(
            dxh1, lc["ln1"]
        )
        dz = dz + dx_ln1

    grads["te"] = np.zeros_like(params["te"])
    grads["te"][:u] = dz.sum(axis=0)
    grads["w_embed"] = tokens.reshape(-1, config.segment_len).T @ dz.reshape(-1, d)
    return grads


def _loss_norm(pred: np.ndarray, actual: np.ndarray) -> tuple[np.ndarray, float]:
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {actual.shape}")
    if pred.ndim == 2:
        pred = pred[None]
        actual = actual[None]
    b, n_tok, j = pred.shape
    # supervised tokens are positions 2..U of a U-token sequence, so the
    # sequence length behind n_tok predictions is U = n_tok + 1; the 1/(UJ)
    # normalization is kept as stated even though only U-1 tokens are summed
    return pred - actual, float(b * (n_tok + 1) * j)


def loss_mse(pred: np.ndarray, actual: np.ndarray) -> float:
    """Mean squared error over predicted tokens, normalized by U*J per sequence."""
    diff, norm = _loss_norm(pred, actual)
    return float(np.sum(diff * diff) / norm)


def loss_mae(pred: np.ndarray, actual: np.ndarray) -> float:
    """Mean absolute error with the same normalization as :func:`loss_mse`."""
    diff, norm = _loss_norm(pred, actual)
    return float(np.sum(np.abs(diff)) / norm)


def loss_grad(pred: np.ndarray, actual: np.ndarray, kind: str) -> tuple[float, np.ndarray]:
    """Loss value and its gradient w.r.t. the predictions."""
    diff, norm = _loss_norm(pred, actual)
    if kind == "mse":
        loss = float(np.sum(diff * diff) / norm)
        grad = 2.0 * diff / norm
    elif kind == "mae":
        loss = float(np.sum(np.abs(diff)) / norm)
        grad = np.sign(diff) / norm
    else:
        raise ValueError(f"unknown loss kind {kind!r}")
    if np.asarray(pred).ndim == 2:
        grad = grad[0]
    return loss, grad


def generate(
    params: dict[str, np.ndarray],
    contexts: np.ndarray,
    horizon: int,
    config: TransformerConfig,
) -> np.ndarray:
    """Autoregressive forecast: emit whole tokens until horizon is covered.

    contexts (B, eps) -> (B, horizon); the last partial token is truncated.
    """
    contexts = np.atleast_2d(np.asarray(contexts, dtype=float))
    tokens = tokenize(contexts, config.segment_len)
    u0 = tokens.shape[1]
    n_new = -(-horizon // config.segment_len)  # ceil
    for _ in range(n_new):
        preds, _ = forward(params, tokens, config)
        tokens = np.concatenate([tokens, preds[:, -1:, :]], axis=1)
    out = detokenize(tokens[:, u0:, :])
    return out[:, :horizon]


class TransformerForecaster:
    """Stateful wrapper pairing a config with its parameter dict."""

    kind = "transformer"

    def __init__(self, config: TransformerConfig | None = None) -> None:
        self.config = config or TransformerConfig()
        self.params: dict[str, np.ndarray] | None = None

    def init_params(self, seed: int) -> None:
        rng = np.random.default_rng([seed, 101])
        self.params = init_params(self.config, rng)

    def loss_and_grads(
        self, contexts: np.ndarray, targets: np.ndarray, loss_kind: str = "mse"
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Token-supervised loss over the concatenated context+target sequence."""
        if self.params is None:
            raise ValueError("parameters not initialized")
        seq = np.concatenate([contexts, targets], axis=1)
        if seq.shape[1] % self.config.segment_len != 0:
            raise ValueError(
                "window length must align with token boundaries; "
                f"got {seq.shape[1]} with segment {self.config.segment_len}"
            )
        tokens = tokenize(seq, self.config.segment_len)
        preds, cache = forward(self.params, tokens, self.config)
        loss, dsup = loss_grad(preds[:, :-1, :], tokens[:, 1:, :], loss_kind)
        dpreds = np.zeros_like(preds)
        dpreds[:, :-1, :] = dsup
        grads = backward(self.params, cache, dpreds, self.config)
        return loss, grads

    def predict(self, contexts: np.ndarray, horizon: int) -> np.ndarray:
        if self.params is None:
            raise ValueError("parameters not initialized")
        return generate(self.params, contexts, horizon, self.config)

    def clone(self) -> "TransformerForecaster":
        other = TransformerForecaster(self.config)
        if self.params is not None:
            other.params = {k: v.copy() for k, v in self.params.items()}
        return other
