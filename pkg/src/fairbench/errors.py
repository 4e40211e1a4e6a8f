"""Exception and warning types shared across the package."""


class FairbenchError(Exception):
    """Base class for all package errors."""


class DataFormatError(FairbenchError):
    """Malformed input data (ragged rows, bad cells); message carries row/column position."""


class SchemaError(FairbenchError):
    """Invalid dataset schema or batch configuration; message carries the YAML path."""


class UndefinedMetricError(FairbenchError):
    """A metric's denominator is empty; message names the group and rate."""


class FitError(FairbenchError):
    """A fitting procedure failed (degenerate input, non-finite objective)."""


class FairbenchWarning(UserWarning):
    """Non-fatal data conditions: dropped rows, unseen categories, degenerate cells."""
