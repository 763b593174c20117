"""Generalized Extreme Value fitting and its mode.

Shape convention: ``xi > 0`` is heavy-tailed (Frechet type), ``xi = 0`` is
Gumbel. Note that ``scipy.stats.genextreme`` uses ``c = -xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn

GUMBEL_EPS = 1e-8
MIN_SAMPLE = 20
MAX_ITER = 500
TOL = 1e-8
_EULER = 0.5772156649015329


class GevParams(NamedTuple):
    mu: float
    sigma: float
    xi: float


@dataclass(frozen=True)
class GevFit:
    params: GevParams | None
    converged: bool
    n: int
    message: str = ""


def gev_log_likelihood(params, sample) -> float:
    """Sum of GEV log-densities; ``-inf`` if any point is outside the support."""
    mu, sigma, xi = params
    x = np.asarray(sample, dtype=float)
    if sigma <= 0 or x.size == 0:
        return -math.inf
    u = (x - mu) / sigma
    if abs(xi) < GUMBEL_EPS:
        return float(-x.size * math.log(sigma) - np.sum(u) - np.sum(np.exp(-u)))
    t = 1.0 + xi * u
    if np.any(t <= 0):
        return -math.inf
    logt = np.log(t)
    return float(-x.size * math.log(sigma) - (1.0 + 1.0 / xi) * np.sum(logt) - np.sum(np.exp(-logt / xi)))


def pwm_estimate(sample) -> GevParams:
    """Probability-weighted-moment estimate (Hosking's approximation)."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    j = np.arange(n)
    b0 = x.mean()
    b1 = np.sum(j / (n - 1) * x) / n
    b2 = np.sum(j * (j - 1) / ((n - 1) * (n - 2)) * x) / n
    c = (2 * b1 - b0) / (3 * b2 - b0) - math.log(2) / math.log(3)
    k = 7.8590 * c + 2.9554 * c * c
    if abs(k) < 1e-6:
        sigma = (2 * b1 - b0) / math.log(2)
        return GevParams(b0 - _EULER * sigma, sigma, 0.0)
    g = gamma_fn(1 + k)
    sigma = (2 * b1 - b0) * k / (g * (1 - 2.0 ** (-k)))
    mu = b0 + sigma * (g - 1) / k
    return GevParams(mu, sigma, -k)


def _start(u: np.ndarray) -> np.ndarray:
    try:
        p = pwm_estimate(u)
        if p.sigma > 0 and math.isfinite(gev_log_likelihood(p, u)):
            return np.array([p.mu, math.log(p.sigma), p.xi])
    except (ZeroDivisionError, FloatingPointError, ValueError):
        pass
    sigma = u.std() * math.sqrt(6) / math.pi
    return np.array([u.mean() - _EULER * sigma, math.log(sigma), 0.0])


def fit_gev_mle(sample, min_n: int = MIN_SAMPLE) -> GevFit:
    """Maximum-likelihood GEV fit by Nelder-Mead over ``(mu, log sigma, xi)``.

    The sample is standardised (median, standard deviation) before fitting
    and the parameters are mapped back, which keeps the simplex well scaled
    for scores spanning many orders of magnitude.
    """
    x = np.asarray(sample, dtype=float)
    x = x[np.isfinite(x)]
    n = x.size
    if n < min_n:
        return GevFit(None, False, n, f"sample of {n} below minimum {min_n}")
    loc = float(np.median(x))
    spread = float(x.std())
    if not spread > 1e-12 * max(abs(loc), 1e-300):
        return GevFit(None, False, n, "zero dispersion")
    u = (x - loc) / spread

    def nll(theta):
        ll = gev_log_likelihood((theta[0], math.exp(theta[1]), theta[2]), u)
        return -ll if math.isfinite(ll) else 1e300

    res = minimize(
        nll,
        _start(u),
        method="Nelder-Mead",
        options={"maxiter": MAX_ITER, "xatol": 1e-6, "fatol": TOL},
    )
    mu, log_sigma, xi = res.x
    params = GevParams(float(loc + spread * mu), float(spread * math.exp(log_sigma)), float(xi))
    ok = bool(res.success) and res.fun < 1e300 and math.isfinite(gev_log_likelihood(params, x))
    return GevFit(params, ok, n, str(res.message))


def gev_mode(params) -> float:
    """Mode of the GEV density; equals ``mu`` in the Gumbel limit."""
    mu, sigma, xi = params
    if xi <= -1:
        raise ValueError(f"GEV with shape {xi} <= -1 has no interior mode")
    if abs(xi) < GUMBEL_EPS:
        return float(mu)
    return float(mu + sigma * ((1 + xi) ** (-xi) - 1) / xi)


def robust_location(sample) -> tuple[float, bool]:
    """GEV mode of ``sample``, or its median when the fit fails.

    Returns ``(value, used_fallback)``.
    """
    fit = fit_gev_mle(sample)
    if fit.converged and fit.params.xi > -1:
        return gev_mode(fit.params), False
    x = np.asarray(sample, dtype=float)
    return float(np.median(x)), True
