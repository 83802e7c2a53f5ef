"""Quasi-deterministic vehicular channel simulator.

Statistically sampled propagation environment (scatterer clusters,
spatially correlated large-scale parameters) combined with deterministic
geometry as the vehicle moves, yielding per-sub-path complex gains and
delays on a fine time grid.
"""

from ddpredict.channel.geometry import (
    SPEED_OF_LIGHT,
    lane_layout,
    path_delay,
    path_phase,
    trajectory,
)
from ddpredict.channel.largescale import (
    autocorrelation,
    combine_endpoint_fields,
    correlated_field,
    cross_correlate,
    ls_mean,
)
from ddpredict.channel.smallscale import composite_gain, rician_power_split
from ddpredict.channel.trace import (
    ChannelSnapshot,
    ChannelTrace,
    Environment,
    generate_trace,
    read_trace,
    sample_environment,
    snapshot,
    write_trace,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "ChannelSnapshot",
    "ChannelTrace",
    "Environment",
    "autocorrelation",
    "combine_endpoint_fields",
    "composite_gain",
    "correlated_field",
    "cross_correlate",
    "generate_trace",
    "lane_layout",
    "ls_mean",
    "path_delay",
    "path_phase",
    "read_trace",
    "rician_power_split",
    "sample_environment",
    "snapshot",
    "trajectory",
    "write_trace",
]
