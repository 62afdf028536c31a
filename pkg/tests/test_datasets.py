"""Synthetic repeated-measures generator."""

import numpy as np

from deconvcdf.datasets import BP_ERROR_STD, BP_MEAN, BP_STD, synthetic_blood_pressure
from deconvcdf.inference import repeated_measures_stats


def test_shape_and_determinism():
    m = synthetic_blood_pressure(n=100, repeats=3, seed=2)
    assert m.shape == (100, 3)
    assert np.array_equal(m, synthetic_blood_pressure(n=100, repeats=3, seed=2))
    assert not np.array_equal(m, synthetic_blood_pressure(n=100, repeats=3, seed=3))


def test_generated_moments_match_the_design():
    m = synthetic_blood_pressure(seed=0)
    assert m.shape == (1615, 2)
    stats = repeated_measures_stats(m)
    # tolerances are ~3 standard errors of each estimate at n=1615
    assert abs(stats.signal_mean - BP_MEAN) < 1.5
    assert abs(stats.error_variance - BP_ERROR_STD**2) < 9.0
    assert abs(stats.signal_variance - BP_STD**2) < 40.0
