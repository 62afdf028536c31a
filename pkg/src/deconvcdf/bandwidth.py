"""Cutoff selection for the deconvolution estimator.

The data-driven rule follows the intersection-of-intervals principle:
around the estimate at every cutoff on a fixed grid, build the interval

    Q(lam) = [Fhat(lam) - K*w*shat(lam), Fhat(lam) + K*w*shat(lam)],

with ``w = sqrt(log(n)/n)`` and ``shat`` the root mean square of the
kernel values, and select the smallest cutoff whose interval still meets
every interval at larger cutoffs.  The multiplier ``K`` comes from a
simulation-calibrated linear rule in the error standard deviation; the
calibration procedure itself ships with the package.  Theoretical cutoff
formulas for supersmooth errors are included for reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import ndtri

from .error_models import LaplaceError, SmoothnessConstants
from .exceptions import DegenerateSample, OutOfCalibrationRange, UnsupportedFamily
from .kernels import DeconvEstimate, QuadConfig, inversion_kernel_grid

__all__ = [
    "default_cutoff_grid",
    "LepskiConfig",
    "StandardizingTransform",
    "standardize",
    "tuning_constant",
    "select_stable_index",
    "lepski_select",
    "adaptive_estimate",
    "variance_constant",
    "BandwidthValue",
    "minimax_bandwidth",
    "smoothness_free_bandwidth",
    "CalibrationConfig",
    "CalibrationResult",
    "calibrate_tuning_constant",
    "linear_rule",
]


def default_cutoff_grid():
    """The selection grid: 200 cutoffs from 0.01 to 9.96 in steps of 0.05."""
    return 0.01 + 0.05 * np.arange(200)


@dataclass(frozen=True)
class LepskiConfig:
    """Settings for the interval-intersection selection rule.

    ``k_eps`` overrides the tuning constant; when ``None`` it is derived
    from the error standard deviation via :func:`tuning_constant` at call
    time.  The width factor ``sqrt(log(n)/n)`` is always evaluated at run
    time from the sample size.
    """

    grid: np.ndarray = field(default_factory=default_cutoff_grid)
    k_eps: float | None = None


@dataclass(frozen=True)
class StandardizingTransform:
    """Location-scale map recorded when a sample is standardized."""

    shift: float
    scale: float

    def map_x(self, x):
        return (x - self.shift) / self.scale

    def unmap_x(self, z):
        return z * self.scale + self.shift

    def map_sigma(self, sigma):
        return sigma / self.scale


def standardize(values):
    """Center and scale a sample to mean 0 and unit standard deviation.

    The scale uses the n-1 divisor.  Returns the transformed sample and
    the :class:`StandardizingTransform` that maps evaluation points and
    error scales onto the new axis.  Raises :class:`DegenerateSample`
    when the sample has zero spread.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("need a 1-d sample with at least two observations")
    shift = float(np.mean(y))
    scale = float(np.std(y, ddof=1))
    if scale == 0.0 or not math.isfinite(scale):
        raise DegenerateSample("sample standard deviation is zero")
    return (y - shift) / scale, StandardizingTransform(shift, scale)


def tuning_constant(sigma_eps):
    """Calibrated interval multiplier 0.0275 + 0.3074 * sigma_eps.

    The linear rule was fitted for error standard deviations up to one;
    larger values raise :class:`OutOfCalibrationRange` (standardize the
    sample instead of extrapolating the rule).
    """
    if sigma_eps < 0:
        raise ValueError("sigma_eps must be nonnegative")
    if sigma_eps > 1.0:
        raise OutOfCalibrationRange(
            f"tuning rule calibrated for sigma_eps <= 1, got {sigma_eps:g}"
        )
    return 0.0275 + 0.3074 * sigma_eps


def select_stable_index(lower, upper):
    """Smallest index whose interval intersects all intervals after it.

    ``lower`` and ``upper`` hold interval bounds along the last axis,
    ordered by ascending cutoff.  Intervals are closed, so touching
    boundaries count as intersecting.  Equivalent to scanning suffixes by
    brute force: the suffix intersection is nonempty iff the running
    maximum of lower bounds stays at or below the running minimum of
    upper bounds.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    run_lo = np.maximum.accumulate(lo[..., ::-1], axis=-1)[..., ::-1]
    run_hi = np.minimum.accumulate(hi[..., ::-1], axis=-1)[..., ::-1]
    ok = run_lo <= run_hi
    idx = np.argmax(ok, axis=-1)
    return int(idx) if np.ndim(idx) == 0 else idx


def _supersmooth_cap(model, n):
    """Largest informative cutoff for an error law with a known
    supersmooth envelope, ``(log(n)/(6*gamma))**(1/beta)``.

    At that point the variance proxy exp(2*gamma*lam**beta) reaches
    n**(1/3).  Past it the kernel scale doubles within a few grid
    steps, so neighbouring estimates decorrelate while the comparison
    half-width stays a fixed small multiple of each estimate's own
    sampling deviation (the calibrated constant times sqrt(log n) is
    below one), and the interval-intersection test degenerates into a
    race between noise terms.  Families without declared smoothness
    constants (kernel scale growing polynomially) return no cap.
    """
    try:
        c = model.smoothness_constants()
    except UnsupportedFamily:
        return None
    inner = math.log(n) / (6.0 * c.gamma)
    if inner <= 0.0:
        return None
    return inner ** (1.0 / c.beta)


def lepski_select(sample, model, x0, cfg=None, quad=None):
    """Run the interval-intersection rule on a sample as given.

    No standardization happens here; use :func:`adaptive_estimate` for
    the full pipeline.  Two guards keep the rule stable when the kernel
    scale explodes with the cutoff (Gaussian-type noise): the candidate
    grid is truncated at the cap of :func:`_supersmooth_cap`, and the
    interval centers are projected onto [0, 1] before intersecting.
    Without them the half-width is a fixed small multiple of each
    estimate's own sampling deviation (the calibrated constant times
    sqrt(log n) is below one), so once the kernel scale starts doubling
    between nearby cutoffs the estimates decorrelate, the informative
    suffix intersections empty out, and the rule strands on noise at
    the top of the grid.  The returned ``raw_value`` stays unprojected.
    """
    cfg = cfg or LepskiConfig()
    quad = quad or QuadConfig()
    y = np.asarray(sample, dtype=float)
    n = y.size
    grid = np.asarray(cfg.grid, dtype=float)
    cap = _supersmooth_cap(model, n)
    if cap is not None and grid[-1] > cap:
        keep = max(int(np.sum(grid <= cap)), 1)
        grid = grid[:keep]
    kernels = inversion_kernel_grid(model, y, x0, grid, quad)
    fhat = 0.5 - kernels.mean(axis=0)
    shat = np.sqrt(np.mean(np.square(kernels), axis=0))
    k_eps = cfg.k_eps if cfg.k_eps is not None else tuning_constant(model.std)
    width = k_eps * math.sqrt(math.log(n) / n) * shat
    center = np.clip(fhat, 0.0, 1.0)
    idx = select_stable_index(center - width, center + width)
    raw = float(fhat[idx])
    return DeconvEstimate(
        value=min(1.0, max(0.0, raw)),
        raw_value=raw,
        lam=float(grid[idx]),
        sigma_lambda=float(shat[idx]),
        x0=float(x0),
    )


def adaptive_estimate(sample, model, x0, cfg=None, quad=None):
    """Standardize, rescale the error law, and select the cutoff.

    The sample is always mapped to mean 0 and unit variance first; the
    evaluation point and the error scale ride along, which keeps the
    tuning rule inside its calibrated range and the Gaussian kernel away
    from overflow.  The reported estimate refers to the original axis
    (CDF values are invariant under the affine map); ``lam`` and
    ``sigma_lambda`` refer to the standardized axis.
    """
    cfg = cfg or LepskiConfig()
    std_values, transform = standardize(sample)
    scaled_model = model.scale_by(1.0 / transform.scale)
    inner = lepski_select(std_values, scaled_model, transform.map_x(x0), cfg, quad)
    return replace(inner, x0=float(x0))


def variance_constant(constants: SmoothnessConstants):
    """Constant of the variance envelope for a supersmooth error law.

    With ``w1 = min(omega0, (2b)**(-1/tau))``:

        (2/pi^2) * [ (2 + 1/tau)^2
                     + 4*c1*Gamma(1/beta) / (gamma^(1/beta)*beta*w1^2*c0^2) ]
    """
    c = constants
    w1 = min(c.omega0, (2.0 * c.b) ** (-1.0 / c.tau))
    head = (2.0 + 1.0 / c.tau) ** 2
    tail = 4.0 * c.c1 * gamma_fn(1.0 / c.beta) / (
        c.gamma ** (1.0 / c.beta) * c.beta * w1**2 * c.c0**2
    )
    return (2.0 / math.pi**2) * (head + tail)


class BandwidthValue(NamedTuple):
    """A theoretical cutoff together with a flag for the floored branch."""

    value: float
    floored: bool


def _floored_root(inner, n, constants):
    floor = math.log(n) / (4.0 * constants.gamma)
    floored = inner < floor
    return BandwidthValue(max(inner, floor) ** (1.0 / constants.beta), floored)


def minimax_bandwidth(n, alpha, L, constants: SmoothnessConstants):
    """Rate-optimal cutoff for a Sobolev-type class of order alpha, radius L.

    Solves the bias-variance balance for a supersmooth error law; the
    result is floored at ``(log(n)/(4*gamma))**(1/beta)``, the validity
    edge of the underlying bound, and the flag reports when the floor
    binds.
    """
    c = constants
    t = math.log(n) / (2.0 * c.gamma)
    if t <= 1.0:
        raise ValueError("sample too small relative to the error scale")
    k0 = math.sqrt(2.0 / math.pi) * (1.0 + 1.0 / math.sqrt(2.0 * alpha + 1.0))
    correction = (
        math.log(variance_constant(c))
        + ((2.0 * alpha + 2.0) / c.beta) * math.log(t)
        - 2.0 * math.log(k0 * L)
    )
    return _floored_root(t - correction / (2.0 * c.gamma), n, c)


def smoothness_free_bandwidth(n, constants: SmoothnessConstants):
    """Adaptive-rate cutoff that needs no smoothness parameters.

    Replaces the class-dependent correction of :func:`minimax_bandwidth`
    by ``log(t)**2``, paying a logarithmic factor in the rate.  Floored
    like the minimax cutoff.
    """
    c = constants
    t = math.log(n) / (2.0 * c.gamma)
    if t <= 1.0:
        raise ValueError("sample too small relative to the error scale")
    correction = math.log(variance_constant(c)) + math.log(t) ** 2
    return _floored_root(t - correction / (2.0 * c.gamma), n, c)


@dataclass(frozen=True)
class CalibrationConfig:
    """Monte Carlo design for calibrating the tuning constant.

    Defaults are sized for a desk run; :meth:`full_scale` returns the
    full design (inner 100, outer 50, candidate step 0.02).
    """

    sigma_grid: np.ndarray = field(
        default_factory=lambda: 0.05 + 0.1 * np.arange(10)
    )
    c_grid: np.ndarray = field(default_factory=lambda: 0.01 + 0.1 * np.arange(100))
    n: int = 2000
    mc_inner: int = 30
    mc_outer: int = 10
    target_prob: float = 0.25

    @staticmethod
    def full_scale():
        return CalibrationConfig(
            c_grid=0.01 + 0.02 * np.arange(500), mc_inner=100, mc_outer=50
        )


@dataclass(frozen=True)
class CalibrationResult:
    sigma_eps: np.ndarray
    c_bar: np.ndarray
    intercept: float
    slope: float


def linear_rule(sigma_values, c_values):
    """Least-squares line through (sigma, c) pairs: (intercept, slope)."""
    slope, intercept = np.polyfit(sigma_values, c_values, 1)
    return float(intercept), float(slope)


def calibrate_tuning_constant(cfg: CalibrationConfig, seed):
    """Re-derive the linear tuning rule by simulation.

    For each error level, standard normal signals are contaminated with
    Laplace noise of that standard deviation; every candidate multiplier
    runs the selection rule on the same datasets, and the candidate with
    the smallest RMSE at the first-quartile target is kept.  Averaging
    over outer repeats and regressing on the error level gives the rule.
    """
    x0 = float(ndtri(cfg.target_prob))
    grid = default_cutoff_grid()
    w_n = math.sqrt(math.log(cfg.n) / cfg.n)
    c_col = np.asarray(cfg.c_grid, dtype=float)[:, None]
    c_bar = np.empty(len(cfg.sigma_grid))
    for si, sigma in enumerate(cfg.sigma_grid):
        model = LaplaceError(sigma / math.sqrt(2.0))
        best = np.empty(cfg.mc_outer)
        for r in range(cfg.mc_outer):
            sq_err = np.zeros(len(c_col))
            for i in range(cfg.mc_inner):
                rng = np.random.default_rng(
                    np.random.SeedSequence((seed, si, r, i))
                )
                y = rng.standard_normal(cfg.n) + model.sample(cfg.n, rng)
                std_values, transform = standardize(y)
                scaled = model.scale_by(1.0 / transform.scale)
                kernels = inversion_kernel_grid(
                    scaled, std_values, transform.map_x(x0), grid
                )
                fhat = 0.5 - kernels.mean(axis=0)
                shat = np.sqrt(np.mean(np.square(kernels), axis=0))
                center = np.clip(fhat, 0.0, 1.0)
                width = c_col * (w_n * shat)
                idx = select_stable_index(center - width, center + width)
                est = center[idx]
                sq_err += (est - cfg.target_prob) ** 2
            best[r] = c_col[np.argmin(sq_err), 0]
        c_bar[si] = best.mean()
    intercept, slope = linear_rule(np.asarray(cfg.sigma_grid, float), c_bar)
    return CalibrationResult(
        sigma_eps=np.asarray(cfg.sigma_grid, dtype=float),
        c_bar=c_bar,
        intercept=intercept,
        slope=slope,
    )
