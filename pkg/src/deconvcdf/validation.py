"""Input checking shared by the estimator classes and the CLI."""

from __future__ import annotations

import numpy as np

__all__ = ["check_sample", "check_repeated", "check_points"]


def check_sample(values, min_size=1):
    """Coerce to a finite 1-d float sample.

    Column vectors of shape (n, 1) are accepted and flattened, matching
    how fit methods receive data.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim == 2 and y.shape[1] == 1:
        y = y[:, 0]
    if y.ndim != 1:
        raise ValueError(f"expected a 1-d sample, got shape {y.shape}")
    if y.size < min_size:
        raise ValueError(f"sample needs at least {min_size} observations")
    if not np.all(np.isfinite(y)):
        raise ValueError("sample contains non-finite values")
    return y


def check_repeated(matrix):
    """Coerce to a finite n-by-p float matrix with p >= 2."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[1] < 2:
        raise ValueError("expected an n-by-p matrix with p >= 2")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite values")
    return m


def check_points(x):
    """Coerce evaluation points to a 1-d float array, tracking scalar input."""
    scalar = np.ndim(x) == 0
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if pts.ndim == 2 and pts.shape[1] == 1:
        pts = pts[:, 0]
    if pts.ndim != 1:
        raise ValueError(f"expected scalar or 1-d evaluation points, got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("evaluation points contain non-finite values")
    return pts, scalar
