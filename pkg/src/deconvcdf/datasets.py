"""Synthetic stand-in for a repeated-measures blood-pressure survey.

No real survey data ships with the package.  The generator below mimics
the structure such data would have: one row per subject, one column per
exam, systolic-pressure-like values around 130 with long-run variation
near 17.5 and exam-to-exam measurement noise near 9.2.  Files in this
format (numeric CSV, two or more columns, optional header) feed the
``infer`` and ``sensitivity`` commands.
"""

from __future__ import annotations

import numpy as np

BP_MEAN = 130.757
BP_STD = 17.528
BP_ERROR_STD = 9.206

__all__ = ["BP_MEAN", "BP_STD", "BP_ERROR_STD", "synthetic_blood_pressure"]


def synthetic_blood_pressure(n=1615, repeats=2, seed=0):
    """Draw an n-by-repeats matrix of noisy exam values.

    Subjects get a Gaussian long-run level, and every exam adds fresh
    Gaussian measurement error.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    signal = rng.normal(BP_MEAN, BP_STD, size=n)
    noise = rng.normal(0.0, BP_ERROR_STD, size=(n, repeats))
    return signal[:, None] + noise
