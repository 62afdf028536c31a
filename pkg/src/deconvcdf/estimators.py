"""Scikit-learn style estimator classes.

Each estimator is fit on a contaminated sample and then predicts CDF
values at arbitrary evaluation points.  The classes wrap the functional
core; all statistical behavior lives there.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .bandwidth import LepskiConfig, adaptive_estimate
from .inference import confidence_interval
from .kernels import QuadConfig, estimate_cdf
from .simex import SimexConfig, ecdf, simex_estimate
from .validation import check_points, check_sample

__all__ = ["DeconvolutionCDF", "EmpiricalCDF", "SimexCDF"]


def _fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} must be fit before calling predict"
        )


class DeconvolutionCDF(BaseEstimator):
    """CDF estimator that inverts a known measurement-error law.

    Parameters
    ----------
    error_model : ErrorModel
        Law of the additive error.
    cutoff : "adaptive" or positive float
        "adaptive" runs the interval-intersection selection on a
        standardized copy of the sample.  A number fixes the frequency
        cutoff on the scale of the data as given.
    k_eps : float, optional
        Override for the selection-rule multiplier; by default it comes
        from the calibrated linear rule in the error level.
    grid : array, optional
        Cutoff grid for the adaptive rule.
    rel_tol : float
        Quadrature tolerance for Gaussian error kernels.
    """

    def __init__(self, error_model=None, cutoff="adaptive", k_eps=None,
                 grid=None, rel_tol=1e-8):
        self.error_model = error_model
        self.cutoff = cutoff
        self.k_eps = k_eps
        self.grid = grid
        self.rel_tol = rel_tol

    def _configs(self):
        kwargs = {} if self.grid is None else {"grid": np.asarray(self.grid, float)}
        return (
            LepskiConfig(k_eps=self.k_eps, **kwargs),
            QuadConfig(rel_tol=self.rel_tol),
        )

    def fit(self, X, y=None):
        """Store the contaminated sample (1-d array or single column)."""
        if self.error_model is None:
            raise ValueError("error_model is required")
        if self.cutoff != "adaptive":
            # np.isscalar alone would let other strings through to the <=
            if isinstance(self.cutoff, str) or not np.isscalar(self.cutoff) \
                    or self.cutoff <= 0:
                raise ValueError("cutoff must be 'adaptive' or a positive number")
        self.sample_ = check_sample(X, min_size=2)
        return self

    def estimate(self, x0):
        """Full diagnostic record (value, cutoff, spread) at one point."""
        _fitted(self, "sample_")
        cfg, quad = self._configs()
        if self.cutoff == "adaptive":
            return adaptive_estimate(self.sample_, self.error_model, x0, cfg, quad)
        return estimate_cdf(self.sample_, self.error_model, x0, self.cutoff, quad)

    def predict(self, X):
        """Estimated F_X at each evaluation point, projected onto [0, 1]."""
        points, scalar = check_points(X)
        values = np.array([self.estimate(p).value for p in points])
        return float(values[0]) if scalar else values

    def predict_interval(self, X, level=0.95, two_sided=True):
        """Confidence bounds around the naive ECDF at each point.

        Returns an (n, 2) array of lower and upper bounds (a plain pair
        for scalar input).
        """
        _fitted(self, "sample_")
        points, scalar = check_points(X)
        cfg, quad = self._configs()
        out = np.empty((points.size, 2))
        for i, p in enumerate(points):
            ci = confidence_interval(
                self.sample_, self.error_model, p, level, cfg, quad,
                adaptive=self.estimate(p).value, two_sided=two_sided,
            )
            out[i] = (ci.lower, ci.upper)
        return (float(out[0, 0]), float(out[0, 1])) if scalar else out


class EmpiricalCDF(BaseEstimator):
    """The plain ECDF of the observations, ignoring contamination."""

    def fit(self, X, y=None):
        self.sample_ = check_sample(X)
        return self

    def predict(self, X):
        _fitted(self, "sample_")
        points, scalar = check_points(X)
        values = ecdf(self.sample_, points)
        return float(values[0]) if scalar else values


class SimexCDF(BaseEstimator):
    """Simulation-extrapolation CDF estimator.

    Parameters
    ----------
    error_model : ErrorModel
        Law used to draw the pseudo noise.
    seed : int or numpy.random.SeedSequence
        Required for any model with positive variance.
    b_pseudo : int
        Pseudo replications per noise level.
    tau_grid : array, optional
        Noise multipliers; defaults to 0.05(0.4875)2.0.
    clip : bool
        Return values projected onto [0, 1] (the raw extrapolation can
        leave the unit interval slightly).
    """

    def __init__(self, error_model=None, seed=None, b_pseudo=2000,
                 tau_grid=None, clip=True):
        self.error_model = error_model
        self.seed = seed
        self.b_pseudo = b_pseudo
        self.tau_grid = tau_grid
        self.clip = clip

    def _config(self):
        kwargs = {} if self.tau_grid is None else {
            "tau_grid": np.asarray(self.tau_grid, float)
        }
        return SimexConfig(b_pseudo=self.b_pseudo, seed=self.seed, **kwargs)

    def fit(self, X, y=None):
        if self.error_model is None:
            raise ValueError("error_model is required")
        self.sample_ = check_sample(X)
        return self

    def estimate(self, x0):
        """Full extrapolation record (curve, coefficients) at the points."""
        _fitted(self, "sample_")
        return simex_estimate(self.sample_, self.error_model, x0, self._config())

    def predict(self, X):
        points, scalar = check_points(X)
        est = self.estimate(points)
        values = est.clipped if self.clip else est.value
        return float(values[0]) if scalar else values
