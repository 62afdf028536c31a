"""ECDF helper and the simulation-extrapolation estimator."""

import numpy as np
import pytest

from deconvcdf.error_models import GammaError, LaplaceError, NoError, NormalError
from deconvcdf.exceptions import SingularDesign
from deconvcdf.simex import (
    SimexConfig,
    default_tau_grid,
    ecdf,
    quad_extrapolate,
    simex_estimate,
)

SEED = 99


def test_ecdf_matches_direct_count(rng):
    y = rng.normal(0.0, 1.0, size=37)
    for x in (-2.0, -0.3, 0.0, 0.4, 3.0):
        assert ecdf(y, x) == np.mean(y <= x)
    # right-continuous step function: counts include ties
    tied = np.array([1.0, 2.0, 2.0, 3.0])
    assert ecdf(tied, 2.0) == 0.75
    assert ecdf(tied, 1.9999) == 0.25
    out = ecdf(tied, np.array([0.0, 2.0, 5.0]))
    assert np.array_equal(out, [0.0, 0.75, 1.0])


def test_ecdf_rejects_empty():
    with pytest.raises(ValueError):
        ecdf(np.array([]), 0.0)


def test_default_tau_grid():
    grid = default_tau_grid()
    assert grid.shape == (5,)
    assert grid[0] == pytest.approx(0.05)
    assert grid[-1] == pytest.approx(2.0)
    assert np.allclose(np.diff(grid), 0.4875)


def test_quad_extrapolate_recovers_exact_quadratic():
    """Values lying on c0 + c1*tau + c2*tau^2 extrapolate exactly."""
    tau = default_tau_grid()
    c0, c1, c2 = 2.0, 3.0, -1.0
    fit = quad_extrapolate(tau, c0 + c1 * tau + c2 * tau**2)
    assert fit.extrapolated == pytest.approx(c0 - c1 + c2, abs=1e-10)
    assert fit.coefficients == pytest.approx([c0, c1, c2], abs=1e-9)


def test_quad_extrapolate_flat_values_short_circuit():
    tau = default_tau_grid()
    fit = quad_extrapolate(tau, np.full(5, 0.42))
    assert fit.extrapolated == 0.42
    assert fit.coefficients[1] == fit.coefficients[2] == 0.0


def test_quad_extrapolate_matrix_columns():
    tau = default_tau_grid()
    a = 1.0 + 0.5 * tau - 0.25 * tau**2
    b = -2.0 + tau
    fit = quad_extrapolate(tau, np.column_stack([a, b]))
    assert fit.extrapolated == pytest.approx([1.0 - 0.5 - 0.25, -3.0], abs=1e-10)


def test_quad_extrapolate_needs_three_distinct_levels():
    with pytest.raises(SingularDesign):
        quad_extrapolate(np.array([0.5, 0.5, 0.5]), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(SingularDesign):
        quad_extrapolate(np.array([0.1, 0.9]), np.array([1.0, 2.0]))


def test_simex_identity_error_is_the_ecdf(rng):
    """With no noise the extrapolation collapses to the plain ECDF."""
    y = rng.normal(0.0, 1.0, size=80)
    pts = np.array([-1.0, 0.0, 0.5, 2.0])
    est = simex_estimate(y, NoError(), pts, SimexConfig())
    assert np.array_equal(est.value, ecdf(y, pts))
    assert np.array_equal(est.value, est.clipped)


def test_simex_requires_seed_for_noisy_models(rng):
    y = rng.normal(0.0, 1.0, size=50)
    with pytest.raises(ValueError):
        simex_estimate(y, LaplaceError(0.3), 0.0, SimexConfig(b_pseudo=10))


def test_simex_deterministic_given_seed(rng):
    y = rng.normal(0.0, 1.0, size=60)
    cfg = SimexConfig(b_pseudo=25, seed=5)
    first = simex_estimate(y, NormalError(0.4), 0.3, cfg)
    again = simex_estimate(y, NormalError(0.4), 0.3, cfg)
    assert first.value == again.value
    assert np.array_equal(first.curve, again.curve)
    other = simex_estimate(y, NormalError(0.4), 0.3, SimexConfig(b_pseudo=25, seed=6))
    assert first.value != other.value


def test_simex_estimate_structure(rng):
    y = rng.normal(0.0, 1.0, size=60)
    cfg = SimexConfig(b_pseudo=25, seed=5)
    est = simex_estimate(y, NormalError(0.4), 0.3, cfg)
    assert est.curve.shape == (5,)
    assert np.all((est.curve >= 0.0) & (est.curve <= 1.0))
    assert 0.0 <= est.clipped <= 1.0
    assert est.clipped == min(1.0, max(0.0, est.value))
    assert est.x0 == 0.3
    assert np.array_equal(est.tau_grid, default_tau_grid())


def test_simex_reduces_the_bias_of_a_shifted_error(rng):
    """Gamma noise shifts the sample right; the extrapolated estimate
    should sit between the truth and the naive value."""
    n = 400
    x = rng.normal(0.0, 1.0, size=n)
    model = GammaError(2.0, 0.35)
    y = x + model.sample(n, rng)
    x0 = 0.0
    naive = ecdf(y, x0)
    est = simex_estimate(y, model, x0, SimexConfig(b_pseudo=200, seed=17))
    truth = 0.5
    assert abs(est.clipped - truth) < abs(naive - truth)
