"""Last-value-carried-forward baseline."""

from __future__ import annotations

import numpy as np


class PersistenceForecaster:
    """Repeats the final context value across the horizon; no parameters."""

    kind = "persistence"

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}

    def init_params(self, seed: int) -> None:
        pass

    def predict(self, contexts: np.ndarray, horizon: int) -> np.ndarray:
        contexts = np.atleast_2d(np.asarray(contexts, dtype=float))
        return np.repeat(contexts[:, -1:], horizon, axis=1)

    def clone(self) -> "PersistenceForecaster":
        return PersistenceForecaster()
