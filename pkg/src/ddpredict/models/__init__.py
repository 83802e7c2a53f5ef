"""Forecasting models built directly on numpy arrays.

A decoder-only transformer trained with manual backpropagation, gated
recurrent baselines (LSTM, GRU) whose sequential kernels have a compiled
and a pure-numpy implementation, a persistence baseline, and the shared
training loop with Adam updates.
"""

from ddpredict.models.checkpoint import (
    forecaster_from_checkpoint,
    load_checkpoint,
    save_checkpoint,
    save_forecaster,
)
from ddpredict.models.optim import Adam
from ddpredict.models.persistence import PersistenceForecaster
from ddpredict.models.recurrent import (
    GRUForecaster,
    LSTMForecaster,
    RecurrentConfig,
)
from ddpredict.models.training import TrainConfig, pretrain_corpus, train
from ddpredict.models.transformer import (
    TokenizerConfig,
    TransformerConfig,
    TransformerForecaster,
    attention,
    loss_mae,
    loss_mse,
    multi_head,
    tokenize,
)

__all__ = [
    "Adam",
    "GRUForecaster",
    "LSTMForecaster",
    "PersistenceForecaster",
    "RecurrentConfig",
    "TokenizerConfig",
    "TrainConfig",
    "TransformerConfig",
    "TransformerForecaster",
    "attention",
    "forecaster_from_checkpoint",
    "load_checkpoint",
    "loss_mae",
    "loss_mse",
    "multi_head",
    "pretrain_corpus",
    "save_checkpoint",
    "save_forecaster",
    "tokenize",
    "train",
]
