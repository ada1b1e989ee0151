"""Exception types shared across the package.

The CLI maps these onto exit codes: validation failures exit 2, numerical
failures (non-convergence, degenerate gaps) exit 3, I/O problems exit 4.
"""


class TrimersenseError(Exception):
    """Base class for all package errors."""


class ValidationError(TrimersenseError):
    """Bad input: wrong shape, non-Hermitian matrix, unknown model, ..."""


class NumericalError(TrimersenseError):
    """A solver failed to converge or hit a degenerate configuration."""
