"""Exception hierarchy shared across the package."""


class EccmarError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(EccmarError):
    """Inputs have incompatible or invalid dimensions."""


class RankDeficientError(EccmarError):
    """A matrix required to have full column rank is numerically rank deficient."""


class NotPositiveDefiniteError(EccmarError):
    """A covariance or moment matrix fell below the positive-definiteness floor."""


class DesignSearchError(EccmarError):
    """The rejection loop for a valid parameter draw exhausted its redraw budget."""


class ProportionalityError(EccmarError):
    """Lag coefficient matrices are not proportional, or violate the reduction
    conditions for an error-correction form of order p."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class EstimationError(EccmarError):
    """The alternating estimator could not produce a usable iterate."""


class ConfigError(EccmarError):
    """Invalid run configuration (unknown key, missing key, bad value)."""


class DataError(EccmarError):
    """Malformed dataset file."""
