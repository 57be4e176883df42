import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import trapezoid

from asianbounds import montecarlo
from asianbounds.errors import NoRoot, StripViolation, ValidationError
from asianbounds.gaussian_asian import GaussianAsianScenario, delta_fd, lb_dmo
from asianbounds.levy_asian import (DampingParams, FourierGrid, delta_levy, density_avg, lb_levy,
                                    lb_objective, optimal_z, ub_levy)
from asianbounds.models import BM, NIG, VG, DiscreteMeasure, GbmSpec, LevySpec, Merton

R = 0.05
VG_DESK = LevySpec(VG(0.2, 0.05, -0.1), r=R)
NIG_DESK = LevySpec(NIG(15.0, -5.0, 0.5), r=R)
MERTON_DESK = LevySpec(Merton(0.15, 0.5, -0.1, 0.15), r=R)
MU10 = DiscreteMeasure.equally_spaced(1.0, 10)


def _bm(sigma=0.3):
    return LevySpec(BM(sigma), r=R)


@pytest.mark.parametrize("K", [90.0, 100.0, 115.0])
def test_bm_reduces_to_gaussian_bound(K):
    gbm = GbmSpec(100.0, 0.3, R)
    ref = lb_dmo(GaussianAsianScenario(gbm, MU10, K)).value
    assert lb_levy(_bm(), MU10, K).value == pytest.approx(ref, abs=1e-8)


def test_bm_single_date_is_black_scholes():
    mu = DiscreteMeasure(np.array([1.0]), np.array([1.0]))
    sig, K = 0.25, 105.0
    d1 = (math.log(100.0 / K) + (R + 0.5 * sig**2)) / sig
    bs = 100.0 * stats.norm.cdf(d1) - K * math.exp(-R) * stats.norm.cdf(d1 - sig)
    assert lb_levy(_bm(sig), mu, K).value == pytest.approx(bs, abs=1e-8)


def test_bm_density_matches_gaussian():
    model = _bm(0.3)
    mean = model.drift * MU10.mean_time
    sd = 0.3 * math.sqrt(MU10.weights @ MU10.brownian_cov() @ MU10.weights)
    z = mean + sd * np.linspace(-5, 5, 41)
    assert np.max(np.abs(density_avg(model, MU10, z) - stats.norm.pdf(z, mean, sd))) < 1e-8


@pytest.mark.parametrize("model", [VG_DESK, NIG_DESK, MERTON_DESK], ids=["VG", "NIG", "Merton"])
def test_density_normalises(model):
    z = np.linspace(-2.0, 2.0, 8001)
    f = density_avg(model, MU10, z)
    assert trapezoid(f, z) == pytest.approx(1.0, abs=1e-6)
    assert np.min(f) > -1e-8


def test_vg_density_against_histogram():
    def sampler(rng, n):
        Y = montecarlo.sim_levy_path(VG_DESK, MU10.times, rng, n) @ MU10.weights
        edges = np.linspace(-0.4, 0.4, 17)
        return np.column_stack([(Y > a) & (Y <= b) for a, b in zip(edges, edges[1:])]).astype(float)

    est = montecarlo.run(sampler, 1_000_000, seed=8)
    edges = np.linspace(-0.4, 0.4, 17)
    # bin probabilities by the trapezoid rule on the inverted density
    probs = []
    for a, b in zip(edges, edges[1:]):
        zz = np.linspace(a, b, 101)
        probs.append(trapezoid(density_avg(VG_DESK, MU10, zz), zz))
    assert np.all(np.abs(est.mean - np.array(probs)) < 4 * est.se + 1e-6)


@pytest.mark.parametrize("alpha1,beta", [(0.5, -0.5), (0.5, -1.5), (1.5, -0.5), (1.5, -1.5)])
def test_damping_independence(alpha1, beta):
    ref = lb_levy(VG_DESK, MU10, 100.0).value
    alt = lb_levy(VG_DESK, MU10, 100.0, damping=DampingParams(alpha1, -1.75, beta)).value
    assert abs(alt - ref) < 1e-6


@pytest.mark.parametrize("model", [_bm(), VG_DESK, NIG_DESK, MERTON_DESK], ids=["BM", "VG", "NIG", "Merton"])
def test_routes_agree(model):
    res = lb_levy(model, MU10, 100.0, cross_check=True)
    assert abs(res.diag["psi_route"] - res.value) < 1e-7
    assert abs(res.diag["objective_1d"] - res.value) < 1e-7


def test_lb_non_increasing_in_strike():
    vals = [lb_levy(VG_DESK, MU10, K).value for K in (85.0, 95.0, 100.0, 105.0, 120.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_optimal_z_matches_gaussian_optimizer():
    gbm = GbmSpec(100.0, 0.3, R)
    zg = lb_dmo(GaussianAsianScenario(gbm, MU10, 100.0)).optimizer
    # Gaussian threshold is on sum_j w_j B_{t_j}; Levy threshold is on <Z, mu>
    expect = _bm(0.3).drift * MU10.mean_time + 0.3 * zg
    assert optimal_z(_bm(0.3), MU10, 100.0) == pytest.approx(expect, abs=1e-8)


def test_optimal_z_is_stationary_point_of_objective():
    obj, _ = lb_objective(VG_DESK, MU10, 100.0)
    z = optimal_z(VG_DESK, MU10, 100.0)
    assert obj(z) >= max(obj(z - 1e-3), obj(z + 1e-3))


def test_zero_strike_falls_back_and_prices_forward():
    with pytest.raises(NoRoot):
        optimal_z(VG_DESK, MU10, 0.0)
    res = lb_levy(VG_DESK, MU10, 0.0)
    fwd = 100.0 * math.exp(-R) * (MU10.weights @ np.exp(R * MU10.times))
    assert res.diag["threshold_method"] == "scan fallback"
    assert res.value == pytest.approx(fwd, abs=1e-6)


def test_bad_inputs():
    with pytest.raises(StripViolation):
        lb_levy(VG_DESK, MU10, 100.0, damping=DampingParams(40.0, -1.75, -1.0))
    with pytest.raises(ValidationError):
        DampingParams(0.75, -0.5, -1.0)
    with pytest.raises(ValidationError):
        FourierGrid(n_xi=300)
    with pytest.raises(ValidationError):
        lb_levy(VG_DESK, MU10, -1.0)


def test_vg_bounds_bracket_mc():
    lb = lb_levy(VG_DESK, MU10, 100.0).value
    mc = montecarlo.mc_asian(VG_DESK, MU10, 100.0, 400_000, seed=31)
    ub = ub_levy(VG_DESK, MU10, 100.0, paths=200_000, seed=32)
    assert lb <= mc.mean + 3 * mc.se
    assert (mc.mean - lb) / mc.mean < 0.01
    assert ub.value >= mc.mean - 3 * mc.se - 3 * ub.diag["se"]


def test_vg_delta_against_mc():
    d = delta_levy(VG_DESK, MU10, 100.0)
    est = montecarlo.mc_asian_delta(VG_DESK, MU10, 100.0, 1_000_000, seed=3)
    assert abs(d - est.mean) < 3 * est.se + 2e-3


def test_bm_delta_matches_gaussian_delta():
    ref = delta_fd(GaussianAsianScenario(GbmSpec(100.0, 0.3, R), MU10, 100.0))
    assert delta_levy(_bm(0.3), MU10, 100.0) == pytest.approx(ref, abs=1e-5)


def test_worker_count_does_not_change_bits():
    a = lb_levy(NIG_DESK, MU10, 100.0, workers=1).value
    b = lb_levy(NIG_DESK, MU10, 100.0, workers=4).value
    assert a == b
