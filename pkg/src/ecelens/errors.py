"""Exception types shared across the package.

SchemaError / ParseError / ValidationError map to CLI exit code 1
(bad input the user can fix); plain OSError from file handling maps
to exit code 2.
"""


class EceLensError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(EceLensError):
    """Schema declaration and data header disagree (missing/duplicate columns, bad kinds)."""


class ParseError(EceLensError):
    """A cell could not be parsed; message carries the offending row index."""


class ValidationError(EceLensError):
    """A run request is malformed (bad instance, bad parameter combination)."""


class CapacityError(EceLensError):
    """An exact computation was requested beyond its supported size."""
