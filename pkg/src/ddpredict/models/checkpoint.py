"""Binary checkpoints: JSON header plus raw little-endian float64 tensors.

Layout: magic ``DDPC``, one version byte, 4-byte little-endian header
length, UTF-8 JSON header, then each tensor's bytes in the header's listed
order.  The header records the model kind, its config, and every tensor's
name and shape, so loading needs no out-of-band information.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DDPC"
VERSION = 1


def save_checkpoint(
    path: str | Path,
    kind: str,
    config: dict,
    params: dict[str, np.ndarray],
    order: list[str] | None = None,
) -> None:
    """Write parameters in a fixed tensor order (dict order by default)."""
    names = order if order is not None else list(params.keys())
    if set(names) != set(params.keys()):
        raise ValueError("tensor order does not cover the parameter dict")
    header = {
        "kind": kind,
        "config": config,
        "tensors": [{"name": n, "shape": list(params[n].shape)} for n in names],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<B", VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for name in names:
            fh.write(np.ascontiguousarray(params[name], dtype="<f8").tobytes())


def save_forecaster(path: str | Path, model) -> None:
    """Checkpoint any fitted forecaster that carries parameters."""
    if getattr(model, "params", None) is None:
        raise ValueError("model has no parameters to save")
    if model.kind == "transformer":
        from ddpredict.models.transformer import param_order

        order = param_order(model.config)
    else:
        order = model.param_order()
    save_checkpoint(path, model.kind, model.config.as_dict(), model.params, order)


def forecaster_from_checkpoint(path: str | Path):
    """Rebuild a forecaster object of the checkpointed kind."""
    kind, config, params = load_checkpoint(path)
    if kind == "transformer":
        from ddpredict.models.transformer import TransformerConfig, TransformerForecaster

        model = TransformerForecaster(TransformerConfig(**config))
    elif kind in ("lstm", "gru"):
        from ddpredict.models.recurrent import (
            GRUForecaster,
            LSTMForecaster,
            RecurrentConfig,
        )

        klass = LSTMForecaster if kind == "lstm" else GRUForecaster
        model = klass(RecurrentConfig(**config))
    else:
        raise ValueError(f"unknown forecaster kind {kind!r} in checkpoint")
    model.params = params
    return model


def load_checkpoint(path: str | Path) -> tuple[str, dict, dict[str, np.ndarray]]:
    """Read a checkpoint; returns (kind, config, params)."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path} is not a checkpoint file (magic {magic!r})")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        params: dict[str, np.ndarray] = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise ValueError(f"truncated tensor {entry['name']} in {path}")
            params[entry["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
        trailing = fh.read(1)
        if trailing:
            raise ValueError(f"trailing bytes after tensors in {path}")
    return header["kind"], header["config"], params
