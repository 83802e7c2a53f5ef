"""Exception types shared across the pipeline.

Plain ``ValueError`` is used for invalid arguments to pure math functions;
the classes here mark failures the CLI maps to distinct exit codes.
"""


class DDPredictError(Exception):
    """Base class for pipeline failures."""


class ConfigError(DDPredictError):
    """Scenario or experiment configuration is invalid."""


class MissingArtifactError(DDPredictError):
    """A referenced file (trace, dataset, checkpoint) does not exist."""


class NumericalError(DDPredictError):
    """A numerical routine failed or produced non-finite values."""
