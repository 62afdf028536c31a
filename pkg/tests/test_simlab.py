"""Simulation laboratory: signal laws, scenario runner, coverage harness."""

import dataclasses
import math

import numpy as np
import pytest
from scipy.special import gammainc, gammaincinv, ndtr, ndtri
from scipy.stats import norm

from deconvcdf.datasets import BP_ERROR_STD, BP_MEAN, BP_STD
from deconvcdf.error_models import (
    CenteredGammaError,
    GammaError,
    LaplaceError,
    NoError,
    NormalError,
)
from deconvcdf.simlab import (
    DEFAULT_PROBS,
    DESK_MC,
    GammaX,
    MixtureNormalX,
    NormalX,
    FULL_MC,
    ScenarioSpec,
    StandardNormalX,
    bp_scenario,
    coverage_experiment,
    run_scenario,
    scenario_catalogue,
    table_scenarios,
)
from deconvcdf.simlab import _error_nodes, _observed_quantile

SEED = 61


def test_scale_constants():
    assert DESK_MC == 300
    assert FULL_MC == 1000
    assert DEFAULT_PROBS == (0.1, 0.25, 0.5, 0.75, 0.9)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_standard_normal_quantiles(p):
    x = StandardNormalX()
    assert x.quantile(p) == pytest.approx(float(ndtri(p)), abs=1e-12)
    assert x.cdf(x.quantile(p)) == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_gamma_signal_quantiles(p):
    """Shape 3, scale 1/sqrt(3): unit variance, inverted via gammaincinv."""
    x = GammaX()
    expected = float(gammaincinv(3.0, p)) / math.sqrt(3.0)
    assert x.quantile(p) == pytest.approx(expected, abs=1e-10)
    assert x.cdf(expected) == pytest.approx(p, abs=1e-12)


def test_gamma_signal_moments(rng):
    x = GammaX()
    draws = x.sample(200_000, rng)
    assert draws.mean() == pytest.approx(math.sqrt(3.0), abs=0.01)
    assert draws.var() == pytest.approx(1.0, abs=0.02)


def test_normal_x_and_mixture():
    x = NormalX(130.757, 17.528)
    assert x.quantile(0.5) == pytest.approx(130.757)
    assert x.cdf(130.757 + 17.528) == pytest.approx(float(ndtr(1.0)))
    mix = MixtureNormalX(0.5, 0.15827, 1.0, 1.0, 0.1225)
    direct = 0.5 * norm.cdf(0.7, 0.15827, 1.0) + 0.5 * norm.cdf(0.7, 1.0, 0.1225)
    assert mix.cdf(0.7) == pytest.approx(float(direct), abs=1e-12)
    q = mix.quantile(0.3)
    assert mix.cdf(q) == pytest.approx(0.3, abs=1e-9)


def test_quantile_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        StandardNormalX().quantile(0.0)
    with pytest.raises(ValueError):
        GammaX().quantile(1.0)


@pytest.mark.parametrize("model", [
    NormalError(0.7),
    LaplaceError(0.4),
    GammaError(2.0, 0.3),
    CenteredGammaError(2.0, 0.3),
], ids=lambda m: m.family)
def test_error_nodes_reproduce_the_law(model):
    """Quadrature nodes integrate to total mass one, the model moments,
    and the characteristic function."""
    pts, w = _error_nodes(model)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(w * pts) == pytest.approx(model.mean, abs=1e-12)
    second = np.sum(w * pts**2) - model.mean**2
    assert second == pytest.approx(model.variance, abs=1e-12)
    for omega in (0.5, 2.0):
        approx = np.sum(w * np.exp(1j * omega * pts))
        assert abs(approx - model.char_fn(omega)) < 1e-12


def test_error_nodes_reject_unknown_models():
    with pytest.raises(ValueError):
        _error_nodes(NoError())


def test_observed_quantile_normal_closed_form():
    """Normal + normal convolves to a normal with summed variances."""
    spec = bp_scenario(repeats=1)
    sigma_y = math.hypot(BP_STD, BP_ERROR_STD)
    for p in DEFAULT_PROBS:
        expected = BP_MEAN + sigma_y * float(ndtri(p))
        assert _observed_quantile(spec, p) == pytest.approx(expected, abs=1e-8)


def test_observed_quantile_laplace_reference():
    # frozen from scipy.integrate.quad of int phi(x) F_eps(t - x) dx
    spec = ScenarioSpec(
        name="t", x_dist=StandardNormalX(),
        error=LaplaceError(0.2 / math.sqrt(2.0)), n=100,
    )
    assert _observed_quantile(spec, 0.25) == pytest.approx(
        -0.6875390955220477, abs=1e-9
    )


def test_observed_quantile_identity_error():
    spec = ScenarioSpec(name="t", x_dist=StandardNormalX(), error=NoError(), n=50)
    assert _observed_quantile(spec, 0.25) == StandardNormalX().quantile(0.25)
    with pytest.raises(ValueError):
        _observed_quantile(spec, 0.0)


def test_scenario_catalogue_structure():
    catalogue = scenario_catalogue()
    assert len(catalogue) == 32
    spec = catalogue["stdnormal-gamma-20-n500"]
    assert isinstance(spec.x_dist, StandardNormalX)
    assert isinstance(spec.error, GammaError)
    assert spec.error.std == pytest.approx(0.2)
    assert spec.n == 500
    assert spec.repeats == 1
    spec = catalogue["gamma-normal-50-n100"]
    assert isinstance(spec.x_dist, GammaX)
    assert isinstance(spec.error, NormalError)
    assert spec.error.sigma == pytest.approx(0.5)
    assert spec.n == 100
    for name, spec in catalogue.items():
        assert spec.name == name
        assert spec.estimators == ("adaptive", "simex", "naive")


def test_table_scenarios():
    one = table_scenarios(1)
    assert len(one) == 8
    assert all("stdnormal-gamma" in s.name for s in one)
    three = table_scenarios("3")
    families = {s.error.family for s in three}
    assert families == {"laplace", "normal"}
    five = table_scenarios(5)
    assert len(five) == 1 and five[0].name == "bp-repeated"
    with pytest.raises(ValueError):
        table_scenarios(7)


def test_bp_scenario():
    repeated = bp_scenario(repeats=2)
    assert repeated.name == "bp-repeated"
    assert repeated.repeats == 2
    assert repeated.n == 500
    assert repeated.x_dist.mu == BP_MEAN
    assert repeated.error.sigma == BP_ERROR_STD
    known = bp_scenario(repeats=1)
    assert known.name == "bp-known"
    assert known.repeats == 1


def _tiny_spec(**overrides):
    base = ScenarioSpec(
        name="tiny",
        x_dist=StandardNormalX(),
        error=LaplaceError(0.2),
        n=80,
        estimators=("adaptive", "naive"),
    )
    return dataclasses.replace(base, **overrides)


def test_run_scenario_shapes_and_truth():
    spec = _tiny_spec()
    result = run_scenario(spec, mc=4, seed=SEED, simex_b=10)
    assert result.estimates.shape == (4, 2, 5)
    assert np.array_equal(result.truth, DEFAULT_PROBS)
    assert np.allclose(result.x0, [float(ndtri(p)) for p in DEFAULT_PROBS])
    assert result.rmse.shape == (2, 5)
    assert result.bias.shape == (2, 5)
    assert np.all(result.estimates >= 0.0) and np.all(result.estimates <= 1.0)
    # rmse definition
    err = result.estimates - result.truth[None, None, :]
    assert np.allclose(result.rmse, np.sqrt((err**2).mean(axis=0)))


def test_run_scenario_deterministic():
    spec = _tiny_spec(estimators=("adaptive", "simex", "naive"))
    first = run_scenario(spec, mc=3, seed=SEED, simex_b=10)
    again = run_scenario(spec, mc=3, seed=SEED, simex_b=10)
    assert np.array_equal(first.estimates, again.estimates)
    other = run_scenario(spec, mc=3, seed=SEED + 1, simex_b=10)
    assert not np.array_equal(first.estimates, other.estimates)


def test_run_scenario_repeated_measurements_branch():
    spec = _tiny_spec(error=NormalError(0.3), repeats=2, n=60)
    result = run_scenario(spec, mc=3, seed=SEED, simex_b=10)
    assert result.estimates.shape == (3, 2, 5)
    assert np.all(np.isfinite(result.estimates))
    again = run_scenario(spec, mc=3, seed=SEED, simex_b=10)
    assert np.array_equal(result.estimates, again.estimates)


def test_run_scenario_rejects_unknown_estimator():
    spec = _tiny_spec(estimators=("adaptive", "oracle"))
    with pytest.raises(ValueError):
        run_scenario(spec, mc=1, seed=SEED)


def test_table_rows_long_format():
    spec = _tiny_spec()
    result = run_scenario(spec, mc=2, seed=SEED, simex_b=10)
    rows = result.table_rows()
    assert len(rows) == 2 * 5
    assert rows[0]["scenario"] == "tiny"
    assert rows[0]["estimator"] == "adaptive"
    assert rows[5]["estimator"] == "naive"
    assert rows[0]["prob"] == 0.1
    assert rows[0]["bias_x10"] == pytest.approx(10.0 * result.bias[0, 0])


def test_coverage_experiment_smoke():
    spec = _tiny_spec(estimators=("adaptive",))
    result = coverage_experiment(spec, level=0.9, mc=4, seed=SEED)
    assert result.coverage.shape == (5,)
    assert np.all((result.coverage >= 0.0) & (result.coverage <= 1.0))
    assert np.all(result.mean_width > 0.0)
    assert np.all(result.mean_lower <= result.mean_upper)
    # evaluation happens at the quantiles of the observed law
    for q, p in enumerate(DEFAULT_PROBS):
        assert result.x0[q] == pytest.approx(_observed_quantile(spec, p))
    again = coverage_experiment(spec, level=0.9, mc=4, seed=SEED)
    assert np.array_equal(result.coverage, again.coverage)
    assert np.array_equal(result.mean_width, again.mean_width)
    rows = result.table_rows()
    assert len(rows) == 5
    assert rows[2]["prob"] == 0.5
    assert rows[2]["coverage"] == result.coverage[2]
