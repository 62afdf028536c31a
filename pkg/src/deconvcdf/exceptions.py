"""Exception and warning types shared across the package."""


class DeconvError(Exception):
    """Base class for errors raised by this package."""


class UnsupportedFamily(DeconvError):
    """An operation was asked for an error family it is not defined for."""


class OverflowRisk(DeconvError):
    """A computation would exceed the floating-point exponent budget."""


class QuadratureNonConvergent(DeconvError):
    """Numerical integration failed to reach the requested tolerance."""


class OutOfCalibrationRange(DeconvError):
    """A tuning rule was evaluated outside the range it was calibrated on."""


class DegenerateSample(DeconvError):
    """The sample has zero spread and cannot be standardized."""


class SingularDesign(DeconvError):
    """A least-squares design matrix is rank deficient."""


class ParseError(DeconvError):
    """An input file contains a non-numeric or malformed entry.

    The 1-based row number is kept in ``row``.
    """

    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


class RaggedRows(DeconvError):
    """Rows of an input file do not all have the same number of columns."""

    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


class EmptyFile(DeconvError):
    """An input file contains no data rows."""


class NegativeSignalVariance(UserWarning):
    """The variance decomposition produced a negative signal variance."""


class DegenerateECDF(UserWarning):
    """The empirical CDF hit 0 or 1, so its binomial standard error is zero."""
