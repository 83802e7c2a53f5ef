"""Gated recurrent forecasters (LSTM and GRU) over univariate windows.

A scalar series is projected into the gate space, run through the selected
recurrence backend, and the final hidden state is mapped to the full
forecast horizon in one linear readout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddpredict.models import backend


@dataclass(frozen=True)
class RecurrentConfig:
    """Cell width and forecast horizon of a gated recurrent model."""

    hidden: int = 32
    horizon: int = 10

    def __post_init__(self) -> None:
        if self.hidden < 1 or self.horizon < 1:
            raise ValueError("hidden width and horizon must be >= 1")

    def as_dict(self) -> dict:
        return {"hidden": self.hidden, "horizon": self.horizon}


class _GatedForecaster:
    """Shared plumbing; subclasses fix the gate count and kernel pair."""

    kind = ""
    n_gate_blocks = 0

    def __init__(self, config: RecurrentConfig | None = None) -> None:
        self.config = config or RecurrentConfig()
        self.params: dict[str, np.ndarray] | None = None

    def param_order(self) -> list[str]:
        return ["w_in", "b_in", "w_hidden", "w_out", "b_out"]

    def init_params(self, seed: int) -> None:
        rng = np.random.default_rng([seed, 201])
        h = self.config.hidden
        gh = self.n_gate_blocks * h
        scale = 0.2
        self.params = {
            "w_in": rng.normal(0.0, scale, (1, gh)),
            "b_in": np.zeros(gh),
            "w_hidden": rng.normal(0.0, scale / np.sqrt(h), (h, gh)),
            "w_out": rng.normal(0.0, scale / np.sqrt(h), (h, self.config.horizon)),
            "b_out": np.zeros(self.config.horizon),
        }

    def _run(self, contexts: np.ndarray):
        raise NotImplementedError

    def _run_backward(self, dh_seq: np.ndarray, run_cache) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _forward_head(self, contexts: np.ndarray):
        contexts = np.atleast_2d(np.asarray(contexts, dtype=float))
        run_cache = self._run(contexts)
        h_last = run_cache[0][:, -1, :]
        preds = h_last @ self.params["w_out"] + self.params["b_out"]
        return preds, h_last, run_cache, contexts

    def loss_and_grads(
        self, contexts: np.ndarray, targets: np.ndarray, loss_kind: str = "mae"
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean per-element loss of the direct multi-step forecast."""
        if self.params is None:
            raise ValueError("parameters not initialized")
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        preds, h_last, run_cache, contexts = self._forward_head(contexts)
        diff = preds - targets
        n = diff.size
        if loss_kind == "mse":
            loss = float(np.sum(diff * diff) / n)
            dpred = 2.0 * diff / n
        elif loss_kind == "mae":
            loss = float(np.sum(np.abs(diff)) / n)
            dpred = np.sign(diff) / n
        else:
            raise ValueError(f"unknown loss kind {loss_kind!r}")

        grads: dict[str, np.ndarray] = {
            "w_out": h_last.T @ dpred,
            "b_out": dpred.sum(axis=0),
        }
        dh_last = dpred @ self.params["w_out"].T
        b, t_steps = contexts.shape
        dh_seq = np.zeros((b, t_steps, self.config.hidden))
        dh_seq[:, -1, :] = dh_last
        dxw, dwh = self._run_backward(dh_seq, run_cache)
        grads["w_hidden"] = dwh
        # input projection xw = x[..., None] @ w_in + b_in
        grads["w_in"] = (contexts.reshape(-1)[:, None] * dxw.reshape(-1, dxw.shape[-1])).sum(
            axis=0, keepdims=True
        )
        grads["b_in"] = dxw.sum(axis=(0, 1))
        return loss, grads

    def predict(self, contexts: np.ndarray, horizon: int) -> np.ndarray:
        if self.params is None:
            raise ValueError("parameters not initialized")
        if horizon > self.config.horizon:
            raise ValueError(
                f"horizon {horizon} exceeds trained horizon {self.config.horizon}"
            )
        preds, _, _, _ = self._forward_head(contexts)
        return preds[:, :horizon]

    def clone(self):
        other = type(self)(self.config)
        if self.params is not None:
            other.params = {k: v.copy() for k, v in self.params.items()}
        return other

    def _project_in(self, contexts: np.ndarray) -> np.ndarray:
        # (B, T) scalars -> (B, T, gate width); BLAS-friendly outer product
        return contexts[..., None] * self.params["w_in"][0] + self.params["b_in"]


class LSTMForecaster(_GatedForecaster):
    """LSTM with gate order [input, forget, candidate, output]."""

    kind = "lstm"
    n_gate_blocks = 4

    def _run(self, contexts: np.ndarray):
        b = contexts.shape[0]
        h = self.config.hidden
        xw = self._project_in(contexts)
        h0 = np.zeros((b, h))
        c0 = np.zeros((b, h))
        h_seq, c_seq, gates = backend.lstm_recurrence(xw, self.params["w_hidden"], h0, c0)
        return h_seq, c_seq, gates, h0, c0

    def _run_backward(self, dh_seq, run_cache):
        h_seq, c_seq, gates, h0, c0 = run_cache
        dxw, dwh, _, _ = backend.lstm_recurrence_backward(
            dh_seq, h_seq, c_seq, gates, self.params["w_hidden"], h0, c0
        )
        return dxw, dwh


class GRUForecaster(_GatedForecaster):
    """GRU with gate order [reset, update, candidate]."""

    kind = "gru"
    n_gate_blocks = 3

    def _run(self, contexts: np.ndarray):
        b = contexts.shape[0]
        h = self.config.hidden
        xw = self._project_in(contexts)
        h0 = np.zeros((b, h))
        h_seq, gates, hh_n = backend.gru_recurrence(xw, self.params["w_hidden"], h0)
        return h_seq, gates, hh_n, h0

    def _run_backward(self, dh_seq, run_cache):
        h_seq, gates, hh_n, h0 = run_cache
        dxw, dwh, _ = backend.gru_recurrence_backward(
            dh_seq, h_seq, gates, hh_n, self.params["w_hidden"], h0
        )
        return dxw, dwh
