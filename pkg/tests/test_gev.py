import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from scipy.stats import genextreme

from sixpoint.gev import GevParams, fit_gev_mle, gev_log_likelihood, gev_mode, pwm_estimate, robust_location


def gev_draws(mu, sigma, xi, n, seed):
    u = np.random.default_rng(seed).uniform(size=n)
    if xi == 0:
        return mu - sigma * np.log(-np.log(u))
    return mu + sigma * ((-np.log(u)) ** (-xi) - 1) / xi


def numeric_mode(mu, sigma, xi):
    """Argmax of scipy's density (note c = -xi): coarse grid, then bounded Brent."""
    dist = genextreme(-xi, loc=mu, scale=sigma)
    lo, hi = dist.ppf(1e-6), dist.ppf(1 - 1e-6)
    grid = np.linspace(lo, hi, 4001)
    i = int(np.argmax(dist.pdf(grid)))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: -dist.logpdf(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    return res.x


def test_gumbel_log_density_at_zero():
    assert gev_log_likelihood((0, 1, 0), [0.0]) == pytest.approx(-1.0)


def test_support_violation():
    assert gev_log_likelihood((0, 1, 1), [-2.0]) == -math.inf
    assert gev_log_likelihood((0, -1, 0.1), [0.0]) == -math.inf


def test_log_likelihood_matches_scipy(rng):
    for _ in range(50):
        mu, sigma, xi = rng.normal(), rng.uniform(0.2, 3), rng.uniform(-0.8, 0.8)
        x = gev_draws(mu, sigma, xi, 30, int(rng.integers(1e9)))
        expected = genextreme.logpdf(x, -xi, loc=mu, scale=sigma).sum()
        assert gev_log_likelihood((mu, sigma, xi), x) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("params, mode", [
    ((3, 2, 0.0), 3.0),
    ((3, 2, 1e-10), 3.0),
    ((0, 1, 1), -0.5),
    ((1, 1, -0.5), 1.585786437626905),
])
def test_mode_examples(params, mode):
    assert gev_mode(params) == pytest.approx(mode, abs=1e-9)
    if params[2] != 0:
        assert numeric_mode(*params) == pytest.approx(mode, abs=1e-6)


def test_mode_needs_xi_above_minus_one():
    with pytest.raises(ValueError):
        gev_mode((0, 1, -1.0))


def test_mode_matches_numeric_argmax(rng):
    for _ in range(100):
        p = (rng.uniform(-5, 5), rng.uniform(0.1, 3), rng.uniform(-0.9, 1.5))
        assert gev_mode(p) == pytest.approx(numeric_mode(*p), abs=1e-6)


def test_mle_recovers_parameters():
    fit = fit_gev_mle(gev_draws(2, 0.5, 0.2, 5000, 1))
    assert fit.converged
    assert np.allclose(fit.params, (2, 0.5, 0.2), atol=0.05)


def test_mle_gumbel_shape():
    fit = fit_gev_mle(gev_draws(1, 2, 0, 5000, 2))
    assert fit.converged and abs(fit.params.xi) < 0.05


def test_pwm_start_is_close():
    p = pwm_estimate(gev_draws(2, 0.5, 0.2, 5000, 3))
    assert np.allclose(p, (2, 0.5, 0.2), atol=0.1)


def test_constant_sample_flags_failure():
    fit = fit_gev_mle(np.full(40, 3.0))
    assert not fit.converged and fit.params is None
    assert robust_location(np.full(40, 3.0)) == (3.0, True)


def test_small_sample_falls_back_to_median():
    x = np.array([5.0, 1.0, 2.0, 9.0])
    assert robust_location(x) == (2.0 + (5.0 - 2.0) / 2, True)
    assert not fit_gev_mle(np.arange(19.0)).converged


def test_fit_respects_support():
    for seed in range(20):
        x = gev_draws(0, 1, np.random.default_rng(seed).uniform(-0.5, 0.8), 75, seed)
        fit = fit_gev_mle(x)
        if fit.converged:
            mu, sigma, xi = fit.params
            assert sigma > 0 and np.all(1 + xi * (x - mu) / sigma > 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-100, 100), st.floats(0.01, 100), st.integers(0, 1000))
def test_mode_location_scale_equivariance(shift, scale, seed):
    x = gev_draws(0, 1, 0.1, 100, seed)
    a, fa = robust_location(x)
    b, fb = robust_location(shift + scale * x)
    assert fa == fb
    assert b == pytest.approx(shift + scale * a, rel=1e-6, abs=1e-6 * scale)


def test_ignores_non_finite_scores():
    x = gev_draws(1, 1, 0.1, 80, 4)
    with_inf = np.concatenate([x, [np.inf, np.nan]])
    assert fit_gev_mle(with_inf).params == fit_gev_mle(x).params
    assert isinstance(fit_gev_mle(x).params, GevParams)
