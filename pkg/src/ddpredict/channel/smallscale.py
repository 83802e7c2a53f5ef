"""Per-sub-path composite gain from powers and geometric phases."""

from __future__ import annotations

import numpy as np


def composite_gain(powers, phases, antenna_gain: complex = 1.0 + 0.0j) -> np.ndarray:
    """Normalized complex gain per sub-path.

    ``g_i = antenna_gain * exp(j*phase_i) * sqrt(P_i) / sqrt(sum(P))`` so the
    total output power equals |antenna_gain|^2 regardless of the power
    split.  ``powers``/``phases`` broadcast; the sub-path axis is the last
    one and the power sum runs over it.
    """
    powers = np.asarray(powers, dtype=float)
    phases = np.asarray(phases, dtype=float)
    if np.any(powers < 0):
        raise ValueError("path powers must be >= 0")
    total = np.sum(powers, axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("total path power must be > 0")
    return antenna_gain * np.exp(1j * phases) * np.sqrt(powers) / np.sqrt(total)


def rician_power_split(k_db, n_scattered: int, los: bool) -> np.ndarray:
    """Relative sub-path powers implied by a Rician K-factor.

    With a direct path present, the direct path takes K/(K+1) of the power
    and the remaining 1/(K+1) is spread uniformly over the ``n_scattered``
    scattered paths (direct path first in the output).  Without one the
    split is uniform.  ``k_db`` may be an array (one value per snapshot);
    +inf puts everything on the direct path, -inf removes it.
    """
    if not los:
        if n_scattered < 1:
            raise ValueError("need at least one scattered path")
        k_db = np.asarray(k_db, dtype=float)
        shape = k_db.shape + (n_scattered,)
        return np.full(shape, 1.0 / n_scattered)
    k_db = np.asarray(k_db, dtype=float)
    k_lin = np.power(10.0, k_db / 10.0)
    with np.errstate(invalid="ignore"):
        p_los = np.where(np.isposinf(k_lin), 1.0, k_lin / (k_lin + 1.0))
    powers = np.empty(k_db.shape + (1 + n_scattered,))
    powers[..., 0] = p_los
    if n_scattered:
        powers[..., 1:] = ((1.0 - p_los) / n_scattered)[..., None]
    return powers
