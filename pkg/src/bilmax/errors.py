"""Exception types shared across the package.

Each numerical failure mode gets its own class so the CLI can map them
to distinct exit codes (invalid input vs. under-resolved grid).
"""


class BilmaxError(Exception):
    """Base class for all package errors."""


class InvalidGridError(BilmaxError):
    """Grid construction or dimension/size mismatch between operands."""


class InvalidParameterError(BilmaxError):
    """Parameter outside its documented domain (p < 1, empty t-grid, ...)."""


class ResolutionError(BilmaxError):
    """Grid too coarse to resolve the requested object."""


class DomainError(BilmaxError):
    """Argument outside the mathematical domain of a special function."""


class UnsupportedOrderError(BilmaxError):
    """Bessel-quotient symbol requested with negative order."""


class TableError(BilmaxError):
    """Requested an entry missing from an embedded constant table."""


class NumericError(BilmaxError):
    """An iteration failed to converge within its budget."""


class InvalidSplitError(BilmaxError):
    """Diagonal/off-diagonal split threshold violates the support rule."""


class FitError(BilmaxError):
    """Not enough samples to perform a least-squares slope fit."""


class ConfigError(BilmaxError):
    """Malformed or unknown experiment configuration."""
