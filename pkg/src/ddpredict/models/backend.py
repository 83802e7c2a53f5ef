"""Recurrence kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is unavailable or ``DDPREDICT_FORCE_NUMPY`` is set to a
non-empty value.  Both expose identical functions (see ``_recurrence_np``
for the contracts), so callers import from here only.
"""

from __future__ import annotations

import os

from ddpredict.models import _recurrence_np

_FORCED = bool(os.environ.get("DDPREDICT_FORCE_NUMPY"))

if not _FORCED:
    try:
        from ddpredict.models import _recurrence_c as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _recurrence_np
        BACKEND = "numpy"
else:
    _impl = _recurrence_np
    BACKEND = "numpy"

lstm_recurrence = _impl.lstm_recurrence
lstm_recurrence_backward = _impl.lstm_recurrence_backward
gru_recurrence = _impl.gru_recurrence
gru_recurrence_backward = _impl.gru_recurrence_backward


def backend_name() -> str:
    """Which recurrence implementation is active: 'compiled' or 'numpy'."""
    return BACKEND
