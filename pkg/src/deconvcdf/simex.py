"""Baseline estimators: the naive ECDF and simulation-extrapolation.

SIMEX attacks contamination from the opposite direction of the inversion
kernel: it adds extra simulated noise at several levels ``tau``, watches
how the empirical CDF degrades, fits a quadratic in ``tau``, and
extrapolates back to ``tau = -1`` where the contamination would vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import SingularDesign

__all__ = [
    "ecdf",
    "QuadFit",
    "quad_extrapolate",
    "SimexConfig",
    "SimexEstimate",
    "simex_estimate",
]


def ecdf(sample, x0):
    """Right-continuous empirical CDF: fraction of the sample <= x0."""
    y = np.sort(np.asarray(sample, dtype=float))
    if y.size == 0:
        raise ValueError("sample is empty")
    counts = np.searchsorted(y, x0, side="right")
    out = counts / y.size
    return float(out) if np.ndim(x0) == 0 else out


class QuadFit(NamedTuple):
    """Quadratic least-squares fit: raw-basis coefficients and its value at -1."""

    coefficients: tuple
    extrapolated: float


def quad_extrapolate(tau, values):
    """Fit ``b0 + b1*t + b2*t^2`` to (tau, values) and evaluate at t = -1.

    The fit runs on centered and scaled abscissas for conditioning; the
    reported coefficients are converted back to the raw basis.  Needs at
    least three distinct tau values, otherwise :class:`SingularDesign`.
    ``values`` may be a matrix with one column per evaluation point, in
    which case every column is extrapolated.
    """
    t = np.asarray(tau, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or np.unique(t).size < 3:
        raise SingularDesign("need at least three distinct tau values")
    if v.shape[0] != t.size:
        raise ValueError("values must have one row per tau")
    if np.ptp(v) == 0.0:
        flat = v.reshape(t.size, -1)[0]
        coef = (flat[0], 0.0, 0.0) if v.ndim == 1 else (flat.copy(), 0.0, 0.0)
        return QuadFit(coef, float(flat[0]) if v.ndim == 1 else flat.copy())
    center = t.mean()
    spread = t.std()
    s = (t - center) / spread
    c2, c1, c0 = np.polyfit(s, v, 2)
    target = (-1.0 - center) / spread
    extrapolated = c2 * target**2 + c1 * target + c0
    # expand b0 + b1*t + b2*t^2 from the scaled-basis coefficients
    b2 = c2 / spread**2
    b1 = c1 / spread - 2.0 * c2 * center / spread**2
    b0 = c0 - c1 * center / spread + c2 * center**2 / spread**2
    if v.ndim == 1:
        return QuadFit((float(b0), float(b1), float(b2)), float(extrapolated))
    return QuadFit((b0, b1, b2), extrapolated)


def default_tau_grid():
    """Five noise multipliers from 0.05 to 2.0 in steps of 0.4875."""
    return 0.05 + 0.4875 * np.arange(5)


@dataclass(frozen=True)
class SimexConfig:
    """Pseudo-noise design: multiplier grid, replications, and the seed.

    ``seed`` may be an integer or a ``numpy.random.SeedSequence``; there
    is no wall-clock fallback, callers must pass one.
    """

    tau_grid: np.ndarray = field(default_factory=default_tau_grid)
    b_pseudo: int = 2000
    seed: object = None


@dataclass(frozen=True)
class SimexEstimate:
    """Extrapolation result at one or more evaluation points.

    ``value`` is the raw extrapolated level (it may leave [0, 1] by a
    little; ``clipped`` projects it back for presentation).  ``curve``
    holds the averaged pseudo ECDFs, one row per tau.
    """

    value: object
    clipped: object
    coefficients: tuple
    tau_grid: np.ndarray
    curve: np.ndarray
    x0: object


def simex_estimate(sample, model, x0, cfg=None):
    """SIMEX estimate of F_X(x0) under a known error model.

    For each tau, ``b_pseudo`` pseudo samples ``Y + sqrt(tau)*eps*`` are
    drawn with fresh errors from ``model``; their ECDFs at ``x0`` are
    averaged, and the quadratic extrapolation to tau = -1 is returned.
    Each tau level consumes an independent child stream of ``cfg.seed``,
    so results are reproducible and independent across levels.  With the
    error-free model the pseudo data equal the sample and the estimate
    is exactly the ECDF.
    """
    cfg = cfg or SimexConfig()
    y = np.asarray(sample, dtype=float)
    scalar = np.ndim(x0) == 0
    points = np.atleast_1d(np.asarray(x0, dtype=float))
    naive = np.array([ecdf(y, p) for p in points])
    tau = np.asarray(cfg.tau_grid, dtype=float)
    if model.variance == 0.0:
        curve = np.tile(naive, (tau.size, 1))
        value = naive.copy()
        coef = (naive.copy(), 0.0, 0.0)
    else:
        if cfg.seed is None:
            raise ValueError("SimexConfig.seed is required for stochastic runs")
        root = (
            cfg.seed
            if isinstance(cfg.seed, np.random.SeedSequence)
            else np.random.SeedSequence(cfg.seed)
        )
        curve = np.empty((tau.size, points.size))
        for row, (t, child) in enumerate(zip(tau, root.spawn(tau.size))):
            rng = np.random.default_rng(child)
            noise = model.sample((cfg.b_pseudo, y.size), rng)
            pseudo = y[None, :] + math.sqrt(t) * noise
            hits = pseudo[:, :, None] <= points[None, None, :]
            curve[row] = hits.mean(axis=(0, 1))
        coef, value = quad_extrapolate(tau, curve)
    clipped = np.clip(value, 0.0, 1.0)
    if scalar:
        coef_out = tuple(
            float(c[0]) if isinstance(c, np.ndarray) else float(c) for c in coef
        )
        return SimexEstimate(
            value=float(np.asarray(value).reshape(-1)[0]),
            clipped=float(np.asarray(clipped).reshape(-1)[0]),
            coefficients=coef_out,
            tau_grid=tau,
            curve=curve[:, 0],
            x0=float(points[0]),
        )
    return SimexEstimate(
        value=np.asarray(value, dtype=float).reshape(points.size),
        clipped=np.asarray(clipped, dtype=float).reshape(points.size),
        coefficients=coef,
        tau_grid=tau,
        curve=curve,
        x0=points,
    )
