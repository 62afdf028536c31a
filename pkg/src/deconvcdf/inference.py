"""Repeated-measures variance estimation and interval construction.

With ``p >= 2`` measurements per subject, the within-subject spread
identifies the measurement-error variance without any distributional
assumption.  Averaging the repeats shrinks the error by ``sqrt(p)``, and
the adaptive estimator then runs on the averaged sample.  The reported
interval widens the binomial band of the ECDF by the distance between
the naive and the adaptive estimator, acknowledging that the ECDF is
biased for the signal CDF.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .bandwidth import LepskiConfig, adaptive_estimate
from .error_models import NormalError
from .exceptions import DegenerateECDF, NegativeSignalVariance
from .simex import ecdf

__all__ = [
    "RepeatedMeasuresStats",
    "repeated_measures_stats",
    "variance_of_error_variance",
    "ConfidenceInterval",
    "confidence_interval",
    "sensitivity_grid",
    "SensitivityRow",
    "sensitivity_scan",
]


@dataclass(frozen=True)
class RepeatedMeasuresStats:
    """Variance decomposition of an n-by-p repeated-measures matrix."""

    error_variance: float
    signal_variance: float
    signal_mean: float
    averaged: np.ndarray
    n: int
    p: int

    @property
    def averaged_error_std(self):
        """Error standard deviation of the per-subject averages."""
        return math.sqrt(self.error_variance / self.p)


def repeated_measures_stats(matrix):
    """Decompose repeated measurements into error and signal variance.

    The error variance is the pooled within-row variance
    ``sum (Y_jk - rowmean_j)^2 / (n*(p-1))``; the signal variance comes
    from the between-row spread with the error contribution removed.  A
    negative signal variance is returned as computed and surfaced with a
    :class:`NegativeSignalVariance` warning rather than clamped, since it
    signals that the error swamps the between-subject spread.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[1] < 2:
        raise ValueError("need an n-by-p matrix with p >= 2")
    if m.shape[0] < 2:
        raise ValueError("need at least two rows")
    n, p = m.shape
    row_means = m.mean(axis=1)
    error_variance = float(np.sum((m - row_means[:, None]) ** 2) / (n * (p - 1)))
    grand = float(row_means.mean())
    between = p * float(np.sum((row_means - grand) ** 2)) / (n - 1)
    signal_variance = (between - error_variance) / p
    if signal_variance < 0:
        warnings.warn(
            f"signal variance {signal_variance:g} is negative",
            NegativeSignalVariance,
            stacklevel=2,
        )
    return RepeatedMeasuresStats(
        error_variance=error_variance,
        signal_variance=signal_variance,
        signal_mean=grand,
        averaged=row_means,
        n=n,
        p=p,
    )


def variance_of_error_variance(error_variance, n, p):
    """Sampling variance of the pooled error-variance estimate.

    Under Gaussian errors: ``2*sigma^4 / (n*(p-1) + 2)``.
    """
    if n < 1 or p < 2:
        raise ValueError("need n >= 1 and p >= 2")
    return 2.0 * error_variance**2 / (n * (p - 1) + 2)


@dataclass(frozen=True)
class ConfidenceInterval:
    """ECDF-centered interval with a bias-widened half width.

    ``half_width = |adaptive - naive| + z * sqrt(naive*(1-naive)/n)``;
    the bounds are ``center`` (the naive ECDF value) plus/minus that,
    projected onto [0, 1], while ``half_width`` itself is stored
    unprojected.  The interval therefore always contains the ECDF
    value.  ``adaptive`` keeps the estimate whose distance to the ECDF
    forms the widening term.  ``degenerate`` flags a naive value of
    exactly 0 or 1, where the binomial standard error vanishes.
    """

    lower: float
    upper: float
    level: float
    center: float
    half_width: float
    adaptive: float
    degenerate: bool = False


def confidence_interval(
    sample,
    model,
    x0,
    level=0.95,
    cfg: LepskiConfig | None = None,
    quad=None,
    adaptive=None,
    two_sided=True,
):
    """Confidence interval for F_X(x0) from a contaminated sample.

    The half width starts from the binomial interval for the observable
    CDF F_Y(x0) and widens by the estimated contamination gap
    ``|adaptive - naive|``, so the band always spans both estimates of
    the CDF at ``x0``.  It is centered at the naive ECDF value.

    ``adaptive`` may be supplied to reuse an already-computed adaptive
    estimate; otherwise the full pipeline runs here.  ``two_sided``
    selects the quantile ``z_{1-alpha/2}`` (default); with ``False``
    the one-sided quantile ``z_{1-alpha}`` is used, giving a narrower
    band that leans harder on the gap term.
    """
    y = np.asarray(sample, dtype=float)
    if not 0.0 < level < 1.0:
        raise ValueError("level must be strictly between 0 and 1")
    naive = ecdf(y, x0)
    if adaptive is None:
        adaptive = adaptive_estimate(y, model, x0, cfg, quad).value
    degenerate = naive in (0.0, 1.0)
    if degenerate:
        warnings.warn(
            "naive ECDF is 0 or 1; the binomial term of the interval vanishes",
            DegenerateECDF,
            stacklevel=2,
        )
    alpha = 1.0 - level
    z = float(ndtri(1.0 - alpha / 2.0)) if two_sided else float(ndtri(1.0 - alpha))
    se = math.sqrt(naive * (1.0 - naive) / y.size)
    half_width = abs(adaptive - naive) + z * se
    return ConfidenceInterval(
        lower=max(0.0, naive - half_width),
        upper=min(1.0, naive + half_width),
        level=level,
        center=naive,
        half_width=half_width,
        adaptive=float(adaptive),
        degenerate=degenerate,
    )


def sensitivity_grid(error_variance, variance_of_estimate, size=10):
    """Equally spaced error-variance values spanning +/- 2 standard errors."""
    spread = 2.0 * math.sqrt(variance_of_estimate)
    return np.linspace(error_variance - spread, error_variance + spread, size)


@dataclass(frozen=True)
class SensitivityRow:
    error_variance: float
    estimate: float
    lower: float
    upper: float


def sensitivity_scan(
    matrix, x0, level=0.95, size=10, cfg=None, quad=None, two_sided=True
):
    """Re-estimate F_X(x0) across plausible error-variance values.

    The grid spans the pooled estimate plus/minus two of its standard
    errors.  Each row re-runs the adaptive estimator and the interval on
    the averaged sample under a Gaussian error law with that variance
    (scaled down by p for the averaging).
    """
    stats = repeated_measures_stats(matrix)
    spread = variance_of_error_variance(stats.error_variance, stats.n, stats.p)
    grid = sensitivity_grid(stats.error_variance, spread, size)
    if grid[0] <= 0:
        raise ValueError("sensitivity grid reaches a nonpositive variance")
    rows = []
    for variance in grid:
        model = NormalError(math.sqrt(variance / stats.p))
        est = adaptive_estimate(stats.averaged, model, x0, cfg, quad)
        ci = confidence_interval(
            stats.averaged,
            model,
            x0,
            level,
            cfg,
            quad,
            adaptive=est.value,
            two_sided=two_sided,
        )
        rows.append(
            SensitivityRow(
                error_variance=float(variance),
                estimate=est.value,
                lower=ci.lower,
                upper=ci.upper,
            )
        )
    return rows
