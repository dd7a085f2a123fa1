"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """Invalid argument: bad index, wrong dimension, malformed input."""


class NumericError(ArithmeticError):
    """A numerical routine failed (non-convergence, non-physical spectrum)."""


class DataError(ValueError):
    """A dataset cannot be used (incomplete, degenerate, all-zero)."""


class FitError(RuntimeError):
    """Curve fit failed to converge or the data has no feature to fit."""
