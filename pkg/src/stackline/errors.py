"""Exception hierarchy.

Every error raised deliberately by the toolkit derives from
``StacklineError``. The CLI maps ``ConfigError`` to exit code 2 and every
other subclass to exit code 1.
"""


class StacklineError(Exception):
    """Base class for toolkit errors."""


class ConfigError(StacklineError):
    """Invalid configuration or usage."""


class ParseError(StacklineError):
    """Malformed input file."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SchemaError(StacklineError):
    """Columns or values do not match what an operation expects."""


class ShapeError(StacklineError):
    """Array dimensions do not agree."""


class BalanceError(StacklineError):
    """Class balancing is impossible for the given labels."""


class PipelineError(StacklineError):
    """A pipeline stage produced an unusable result."""


class StatError(StacklineError):
    """A statistic is undefined for the given input."""


class SelectionError(StacklineError):
    """Feature selection kept nothing."""


class TrainingError(StacklineError):
    """A learner cannot be fitted on the given data."""


class DivergenceError(TrainingError):
    """Training produced a non-finite objective."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class StratificationError(TrainingError):
    """Stratified folds cannot be formed."""
