import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, stats

from asianbounds import montecarlo
from asianbounds.bounds_core import (gaussian_exp_indicator, maximize_lb, minimize_ub, norm_cdf,
                                     ub_objective_from_samples)
from asianbounds.errors import BracketTooSmall, DegenerateW, FlatObjective
from asianbounds.gaussian_asian import GaussianAsianScenario, _dmo_objective, lb_dmo
from asianbounds.models import DiscreteMeasure, GbmSpec


def test_norm_cdf_tails():
    assert norm_cdf(0.0) == 0.5
    assert norm_cdf(-37.0) > 0.0
    assert norm_cdf(-10.0) == pytest.approx(stats.norm.cdf(-10.0), rel=1e-13)


def test_indicator_trivial_limits():
    assert gaussian_exp_indicator(0.0, 0.0, 0.0, 1.0, 0.0, 0.0) == pytest.approx(0.5, abs=1e-16)
    assert gaussian_exp_indicator(0.1, 0.04, 0.0, 1.0, 0.0, -1e3) == pytest.approx(math.exp(0.12), abs=1e-15)
    with pytest.raises(DegenerateW):
        gaussian_exp_indicator(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_indicator_against_gauss_hermite():
    mG, vG, mW, vW, c, z = 0.1, 0.04, 0.0, 1.0, 0.15, 0.3
    x, w = np.polynomial.hermite_e.hermegauss(200)
    w = w / math.sqrt(2 * math.pi)
    # W = mW + sqrt(vW) X1, G = mG + c/sqrt(vW) X1 + sqrt(vG - c^2/vW) X2; X2 integrates out
    X1 = x
    resid = vG - c**2 / vW
    inner = np.exp(mG + c / math.sqrt(vW) * X1 + 0.5 * resid)
    # smooth the indicator edge with a fine split at the jump
    lo = (z - mW) / math.sqrt(vW)
    val, _ = integrate.quad(lambda u: math.exp(mG + c / math.sqrt(vW) * u + 0.5 * resid) * stats.norm.pdf(u),
                            lo, np.inf, epsabs=1e-14, epsrel=1e-13)
    assert gaussian_exp_indicator(mG, vG, mW, vW, c, z) == pytest.approx(val, abs=1e-10)
    # Gauss-Hermite of the unrestricted expectation recovers the lognormal mean
    assert inner @ w == pytest.approx(math.exp(mG + vG / 2), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 0.5), st.floats(-1, 1), st.floats(0.05, 2), st.floats(-0.9, 0.9),
       st.floats(-3, 3))
def test_indicator_split_property(mG, vG, mW, vW, rho, z):
    c = rho * math.sqrt(vG * vW)
    above = gaussian_exp_indicator(mG, vG, mW, vW, c, z)
    below = math.exp(mG + vG / 2) * norm_cdf(-(mW + c - z) / math.sqrt(vW))
    assert above + below == pytest.approx(math.exp(mG + vG / 2), rel=1e-12)


def test_maximize_lb_on_quadratic():
    res = maximize_lb(lambda z: -(z - 0.3) ** 2, (-2.0, 2.0))
    assert res.optimizer == pytest.approx(0.3, abs=1e-7)
    assert res.value == pytest.approx(0.0, abs=1e-14)


def test_maximize_lb_flat_objective():
    res = maximize_lb(lambda z: 0.0, (-1.0, 1.0))
    assert res.value == 0.0 and res.diag["flat"]
    with pytest.raises(FlatObjective):
        maximize_lb(lambda z: 0.0, (-1.0, 1.0), on_flat="raise")


def test_maximize_lb_table1_row():
    sc = GaussianAsianScenario(GbmSpec(100.0, 0.2, 0.05), DiscreteMeasure.equally_spaced(0.317, 80), 100.0)
    res = lb_dmo(sc)
    assert abs(res.value - 3.0057) < 5e-4
    obj, _ = _dmo_objective(sc)
    for dz in (-1e-4, 1e-4):
        assert res.value >= obj(res.optimizer + dz)


def test_maximize_lb_three_point_toy_against_brute_force():
    sig, T, S0, K, r = 0.3, 1.0, 100.0, 100.0, 0.05
    mu = DiscreteMeasure.equally_spaced(T, 3)
    res = lb_dmo(GaussianAsianScenario(GbmSpec(S0, sig, r), mu, K))
    # independent oracle: integrate the conditional mean of S given W by quad, maximize with scipy
    C = mu.brownian_cov()
    cw = C @ mu.weights
    vW = float(mu.weights @ cw)
    drift = (r - 0.5 * sig**2) * mu.times

    def cond_payoff(u):
        b = cw / vW * u
        var = sig**2 * (mu.times - cw**2 / vW)
        return float(mu.weights @ (S0 * np.exp(drift + sig * b + 0.5 * var))) - K

    def objective(z):
        val, _ = integrate.quad(lambda u: cond_payoff(u) * stats.norm.pdf(u, scale=math.sqrt(vW)), z, 12 * math.sqrt(vW),
                                epsabs=1e-13, epsrel=1e-12)
        return math.exp(-r * T) * val

    opt = optimize.minimize_scalar(lambda z: -objective(z), bounds=(-2.0, 2.0), method="bounded",
                                   options={"xatol": 1e-10})
    brute = -opt.fun
    assert res.value == pytest.approx(brute, abs=1e-6)


def test_minimize_ub_edge_and_expansion():
    res = minimize_ub(lambda a: ((a - 3.5) ** 2, 0.0), (0.0, 3.0))
    assert res.diag["expanded"] and res.optimizer == pytest.approx(3.5, abs=1e-5)
    with pytest.raises(BracketTooSmall):
        minimize_ub(lambda a: (-a, 0.0), (0.0, 1.0))


def _toy_paths(seed, n=200_000):
    mu = DiscreteMeasure.equally_spaced(1.0, 4)
    rng = montecarlo.chunk_rng(seed, 0)
    Z = montecarlo.sim_levy_path(GbmSpec(100.0, 0.3, 0.05), mu.times, rng, n)
    return mu, 100.0 * np.exp(Z), Z


def test_ub_with_exact_proxy_equals_mc():
    mu, S, _ = _toy_paths(1)
    disc = math.exp(-0.05)
    obj = ub_objective_from_samples(S, S, mu.weights, 100.0, disc)
    mc = disc * np.maximum(S @ mu.weights - 100.0, 0.0)
    val, se = obj(1.0)
    assert val == pytest.approx(mc.mean(), abs=1e-12)
    res = minimize_ub(obj, (0.0, 3.0))
    assert abs(res.value - mc.mean()) < 3 * se


def test_ub_at_zero_is_jensen_bound_and_convex():
    mu, S, Z = _toy_paths(2)
    disc = math.exp(-0.05)
    obj = ub_objective_from_samples(S, 100.0 * Z, mu.weights, 100.0, disc)
    jensen = disc * (np.maximum(S - 100.0, 0.0) @ mu.weights).mean()
    assert obj(0.0)[0] == pytest.approx(jensen, rel=1e-14)
    (f1, s1), (f2, s2), (f3, s3) = obj(0.2), obj(0.6), obj(1.0)
    assert f2 <= 0.5 * (f1 + f3) + 3 * math.sqrt(s1**2 + s2**2 + s3**2)
