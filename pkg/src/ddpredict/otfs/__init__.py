"""OTFS modulation core.

Delay-Doppler grids are carried through the symplectic Fourier pair to the
time-frequency plane, then to a cyclic time-domain frame via per-slot DFTs
(rectangular pulses).  Channels act either sample-by-sample in time or as a
sparse set of delay-Doppler taps; both views agree for on-grid paths.
"""

from ddpredict.otfs.channel import (
    apply_channel_time,
    dd_response,
    quantize_delay,
    tf_response,
)
from ddpredict.otfs.transforms import (
    OTFSConfig,
    TimeSignal,
    heisenberg,
    isfft,
    read_grid,
    sfft,
    wigner,
    write_grid,
)

__all__ = [
    "OTFSConfig",
    "TimeSignal",
    "apply_channel_time",
    "dd_response",
    "heisenberg",
    "isfft",
    "quantize_delay",
    "read_grid",
    "sfft",
    "tf_response",
    "wigner",
    "write_grid",
]
