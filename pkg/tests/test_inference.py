"""Repeated-measures decomposition, interval construction, sensitivity scan."""

import math

import numpy as np
import pytest
from scipy.special import ndtri

from deconvcdf.datasets import synthetic_blood_pressure
from deconvcdf.error_models import LaplaceError, NormalError
from deconvcdf.exceptions import DegenerateECDF, NegativeSignalVariance
from deconvcdf.inference import (
    confidence_interval,
    repeated_measures_stats,
    sensitivity_grid,
    sensitivity_scan,
    variance_of_error_variance,
)
from deconvcdf.simex import ecdf

SEED = 5


def test_repeated_measures_hand_example():
    """3-by-2 matrix small enough to decompose by hand.

    Row means (2, 2, 7); pooled within-row variance 10/3; between-row
    mean square 50/3; signal variance (50/3 - 10/3)/2 = 20/3.
    """
    m = [[1.0, 3.0], [2.0, 2.0], [5.0, 9.0]]
    stats = repeated_measures_stats(m)
    assert stats.n == 3 and stats.p == 2
    assert np.array_equal(stats.averaged, [2.0, 2.0, 7.0])
    assert stats.error_variance == pytest.approx(10.0 / 3.0)
    assert stats.signal_variance == pytest.approx(20.0 / 3.0)
    assert stats.signal_mean == pytest.approx(11.0 / 3.0)
    assert stats.averaged_error_std == pytest.approx(math.sqrt(10.0 / 6.0))


def test_repeated_measures_recovers_simulation_truth():
    matrix = synthetic_blood_pressure(n=1615, repeats=2, seed=SEED)
    stats = repeated_measures_stats(matrix)
    # sd of the pooled variance estimate is sqrt(2 sigma^4 / (n+2)) ~ 3
    assert abs(stats.error_variance - 9.206**2) < 10.0
    assert abs(stats.signal_variance - 17.528**2) < 40.0
    assert abs(stats.signal_mean - 130.757) < 2.0


def test_repeated_measures_warns_when_noise_swamps_signal():
    m = [[0.0, 10.0], [10.0, 0.0], [0.1, 9.9]]
    with pytest.warns(NegativeSignalVariance):
        stats = repeated_measures_stats(m)
    assert stats.signal_variance < 0.0


def test_repeated_measures_input_checks():
    with pytest.raises(ValueError):
        repeated_measures_stats(np.ones((5, 1)))
    with pytest.raises(ValueError):
        repeated_measures_stats(np.ones(5))
    with pytest.raises(ValueError):
        repeated_measures_stats(np.ones((1, 3)))


def test_variance_of_error_variance_formula():
    assert variance_of_error_variance(2.0, 10, 3) == pytest.approx(8.0 / 22.0)
    # the reference scalar: sigma^2 = 84.755, n = 1615, p = 2
    value = variance_of_error_variance(84.755, 1615, 2)
    assert math.sqrt(value) == pytest.approx(2.981, abs=1e-3)
    with pytest.raises(ValueError):
        variance_of_error_variance(1.0, 0, 2)
    with pytest.raises(ValueError):
        variance_of_error_variance(1.0, 10, 1)


def test_sensitivity_grid_reference_endpoints():
    variance = variance_of_error_variance(84.755, 1615, 2)
    grid = sensitivity_grid(84.755, variance, size=10)
    assert grid.shape == (10,)
    assert grid[0] == pytest.approx(78.793, abs=1e-3)
    assert grid[-1] == pytest.approx(90.716, abs=1e-3)
    assert np.allclose(np.diff(grid), np.diff(grid)[0])


def test_confidence_interval_math(rng):
    """Half width is |adaptive - naive| plus the binomial z term."""
    y = rng.normal(0.0, 1.0, size=250)
    model = LaplaceError(0.3)
    x0 = 0.2
    ci = confidence_interval(y, model, x0, level=0.95)
    naive = ecdf(y, x0)
    z = float(ndtri(0.975))
    se = math.sqrt(naive * (1.0 - naive) / y.size)
    expected = abs(ci.adaptive - naive) + z * se
    assert ci.half_width == pytest.approx(expected, abs=1e-12)
    assert ci.center == naive
    assert ci.lower == pytest.approx(max(0.0, naive - expected))
    assert ci.upper == pytest.approx(min(1.0, naive + expected))
    assert ci.lower <= naive <= ci.upper
    assert ci.lower <= ci.adaptive <= ci.upper
    assert not ci.degenerate


def test_confidence_interval_one_sided_quantile(rng):
    y = rng.normal(0.0, 1.0, size=250)
    model = LaplaceError(0.3)
    two = confidence_interval(y, model, 0.2, level=0.95, two_sided=True)
    one = confidence_interval(y, model, 0.2, level=0.95, two_sided=False)
    naive = ecdf(y, 0.2)
    se = math.sqrt(naive * (1.0 - naive) / y.size)
    delta = float(ndtri(0.975) - ndtri(0.95)) * se
    assert two.half_width - one.half_width == pytest.approx(delta, abs=1e-12)


def test_confidence_interval_reuses_supplied_adaptive(rng):
    y = rng.normal(0.0, 1.0, size=100)
    ci = confidence_interval(y, LaplaceError(0.3), 0.0, adaptive=0.75)
    assert ci.adaptive == 0.75
    naive = ecdf(y, 0.0)
    z = float(ndtri(0.975))
    expected = abs(0.75 - naive) + z * math.sqrt(naive * (1 - naive) / 100.0)
    assert ci.half_width == pytest.approx(expected)


def test_confidence_interval_degenerate_ecdf(rng):
    y = rng.normal(0.0, 1.0, size=50)
    x0 = y.min() - 10.0
    with pytest.warns(DegenerateECDF):
        ci = confidence_interval(y, LaplaceError(0.3), x0, adaptive=0.02)
    assert ci.degenerate
    assert ci.center == 0.0
    # binomial term vanished, only the gap term remains
    assert ci.half_width == pytest.approx(0.02)
    assert ci.lower == 0.0


def test_confidence_interval_level_checked(rng):
    y = rng.normal(0.0, 1.0, size=50)
    for level in (0.0, 1.0, -0.5, 1.7):
        with pytest.raises(ValueError):
            confidence_interval(y, LaplaceError(0.3), 0.0, level=level, adaptive=0.5)


def test_sensitivity_scan_rows():
    matrix = synthetic_blood_pressure(n=300, repeats=2, seed=SEED)
    rows = sensitivity_scan(matrix, 140.0, level=0.95, size=7)
    assert len(rows) == 7
    variances = [r.error_variance for r in rows]
    assert variances == sorted(variances)
    stats = repeated_measures_stats(matrix)
    spread = 2.0 * math.sqrt(
        variance_of_error_variance(stats.error_variance, stats.n, stats.p)
    )
    assert variances[0] == pytest.approx(stats.error_variance - spread)
    assert variances[-1] == pytest.approx(stats.error_variance + spread)
    for r in rows:
        assert r.lower <= r.estimate <= r.upper
        assert 0.0 <= r.estimate <= 1.0


def test_sensitivity_scan_rejects_nonpositive_grid():
    # three rows cannot pin the error variance down to two standard errors
    m = [[1.0, 2.0], [2.0, 4.0], [3.0, 7.0]]
    with pytest.raises(ValueError):
        sensitivity_scan(m, 2.0)


def test_sensitivity_scan_matches_direct_estimates():
    matrix = synthetic_blood_pressure(n=200, repeats=2, seed=SEED)
    stats = repeated_measures_stats(matrix)
    rows = sensitivity_scan(matrix, 140.0, size=3)
    from deconvcdf.bandwidth import adaptive_estimate

    mid = rows[1]
    model = NormalError(math.sqrt(mid.error_variance / stats.p))
    direct = adaptive_estimate(stats.averaged, model, 140.0)
    assert mid.estimate == direct.value
