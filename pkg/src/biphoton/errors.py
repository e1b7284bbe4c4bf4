"""Exception hierarchy shared by the simulation modules."""


class BiphotonError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BiphotonError, ValueError):
    """Amplitude is in the wrong representation or on an unsuitable axis."""


class ConfigurationError(BiphotonError, ValueError):
    """Invalid parameters, grids that are too coarse, or sampling violations."""


class DegenerateInputError(BiphotonError, ValueError):
    """Input carries no usable signal (all-zero amplitude, empty window)."""


class MeasurementError(BiphotonError, RuntimeError):
    """A fit or estimator failed to produce a meaningful value."""


class SaturationError(MeasurementError):
    """Interference visibility is below the numeric floor (K is unbounded)."""


class PortLabelError(MeasurementError):
    """Destructive port carries more counts than the constructive port."""


class SamplingError(ConfigurationError):
    """A quadratic phase mask would alias on the current grid."""
