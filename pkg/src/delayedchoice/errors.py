"""Exception types raised across the package."""


class DelayedChoiceError(Exception):
    """Base class for every error raised by this package."""


class LabelingConflictError(DelayedChoiceError, ValueError):
    """Two operands share a subsystem name where disjoint names are required."""


class SubsystemLookupError(DelayedChoiceError, LookupError):
    """A subsystem or mode name does not exist on the operand."""


class NormalizationError(DelayedChoiceError, ValueError):
    """Weights or amplitudes fail to sum to one."""


class InvariantError(DelayedChoiceError, ValueError):
    """A value violates the invariants of its type."""


class EstimationError(DelayedChoiceError, ValueError):
    """Not enough data to estimate a quantity."""


class ConfigError(DelayedChoiceError, ValueError):
    """An experiment configuration is malformed or inconsistent."""
