import math

import numpy as np
import pytest
from scipy import stats

from asianbounds import montecarlo
from asianbounds.cli import table1_scenario
from asianbounds.models import BM, NIG, VG, DiscreteMeasure, GbmSpec, LevySpec, Merton, char_exponent
from asianbounds.vwap import expected_measure

MODELS = {
    "BM": LevySpec(BM(0.2), r=0.05),
    "VG": LevySpec(VG(0.2, 0.05, -0.1), r=0.05),
    "NIG": LevySpec(NIG(15.0, -5.0, 0.5), r=0.05),
    "Merton": LevySpec(Merton(0.15, 0.5, -0.1, 0.15), r=0.05, q=0.01),
}


@pytest.mark.parametrize("name", list(MODELS))
def test_martingale(name):
    model = MODELS[name]
    est = montecarlo.run(lambda rng, n: np.exp(montecarlo.sim_levy_increments(model, [1.0], rng, n)[:, 0]),
                         1_000_000, seed=17)
    assert abs(est.mean - math.exp(model.r - model.q)) < 3 * est.se


def test_bm_variance():
    model = MODELS["BM"]
    batches = [np.var(montecarlo.sim_levy_increments(model, [1.0], montecarlo.chunk_rng(3, i), 100_000)[:, 0],
                      ddof=1) for i in range(50)]
    assert abs(np.mean(batches) - 0.04) < 3 * np.std(batches, ddof=1) / math.sqrt(50)


def test_path_increments_add_up():
    model = MODELS["NIG"]
    times = np.array([0.2, 0.5, 1.0])
    Z = montecarlo.sim_levy_path(model, times, montecarlo.chunk_rng(0, 0), 1000)
    dZ = montecarlo.sim_levy_increments(model, np.diff(times, prepend=0.0), montecarlo.chunk_rng(0, 0), 1000)
    assert np.array_equal(Z, np.cumsum(dZ, axis=1))


def _cumulant4_fd(model, h=0.05):
    # psi(u) = sum_n kappa_n (iu)^n / n!, so kappa_4 = psi''''(0) via a 7-point real-axis stencil
    u = h * np.arange(-3, 4)
    c = np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0
    return float((c @ model.exponent(u)).real / h**4)


def test_vg_fourth_cumulant():
    p = MODELS["VG"].process
    exact = 3 * p.sigma**4 * p.nu + 12 * p.sigma**2 * p.theta**2 * p.nu**2 + 6 * p.theta**4 * p.nu**3
    assert _cumulant4_fd(MODELS["VG"]) == pytest.approx(exact, rel=1e-3)
    batches = [stats.kstat(montecarlo.sim_levy_increments(MODELS["VG"], [1.0], montecarlo.chunk_rng(9, i),
                                                          100_000)[:, 0], 4) for i in range(100)]
    assert abs(np.mean(batches) - exact) < 3 * np.std(batches, ddof=1) / 10.0


def test_characteristic_function_nig():
    model = MODELS["NIG"]

    def sampler(rng, n):
        z = montecarlo.sim_levy_increments(model, [0.5], rng, n)[:, 0]
        return np.column_stack([np.cos(3 * z), np.sin(3 * z)])

    est = montecarlo.run(sampler, 500_000, seed=2)
    phi = np.exp(0.5 * char_exponent(model, 3.0))
    assert abs(est.mean[0] - phi.real) < 3 * est.se[0] and abs(est.mean[1] - phi.imag) < 3 * est.se[1]


def test_constant_payoff():
    est = montecarlo.run(lambda rng, n: np.ones(n), 100_000, seed=0)
    assert est.mean == 1.0 and est.se == 0.0


def test_bitwise_determinism_and_worker_independence():
    mu = DiscreteMeasure.equally_spaced(1.0, 12)
    a = montecarlo.mc_asian(MODELS["VG"], mu, 100.0, 300_000, seed=5, workers=1)
    b = montecarlo.mc_asian(MODELS["VG"], mu, 100.0, 300_000, seed=5, workers=1)
    c = montecarlo.mc_asian(MODELS["VG"], mu, 100.0, 300_000, seed=5, workers=8)
    assert a == b == c
    assert a.chunk_layout == (montecarlo.CHUNK_PATHS, 10)


def test_env_var_sets_worker_default(monkeypatch):
    monkeypatch.setenv(montecarlo.WORKERS_ENV, "3")
    assert montecarlo.default_workers() == 3


def test_chunk_layout():
    assert montecarlo.chunk_layout(100, 32) == [32, 32, 32, 4]
    assert sum(montecarlo.chunk_layout(1_000_000)) == 1_000_000
    # the one-chunk and 64-chunk runs are different layouts; each is reproducible across worker counts
    one = montecarlo.run(lambda rng, n: rng.standard_normal(n), 64 * 1024, seed=1, chunk_size=64 * 1024)
    many = montecarlo.run(lambda rng, n: rng.standard_normal(n), 64 * 1024, seed=1, chunk_size=1024, workers=1)
    many8 = montecarlo.run(lambda rng, n: rng.standard_normal(n), 64 * 1024, seed=1, chunk_size=1024, workers=8)
    assert many.mean == many8.mean and many.se == many8.se
    assert one.chunk_layout != many.chunk_layout


def test_coverage_calibration():
    S0, K, r, sig, T = 100.0, 105.0, 0.05, 0.2, 1.0
    d1 = (math.log(S0 / K) + (r + 0.5 * sig**2) * T) / (sig * math.sqrt(T))
    bs = S0 * stats.norm.cdf(d1) - K * math.exp(-r * T) * stats.norm.cdf(d1 - sig * math.sqrt(T))
    mu = DiscreteMeasure(np.array([T]), np.array([1.0]))
    hits = 0
    for seed in range(100):
        est = montecarlo.mc_asian(GbmSpec(S0, sig, r), mu, K, 100_000, seed=1000 + seed)
        lo, hi = est.interval(3.0)
        hits += lo <= bs <= hi
    assert hits >= 95


def test_table1_sigma02_asian_mc():
    sc = table1_scenario(0.2)
    est = montecarlo.mc_asian(sc.price, expected_measure(sc), 100.0, 1_000_000, seed=2026)
    assert abs(est.mean - 3.0056) < 3 * math.hypot(est.se, 0.0013)


def test_antithetic_flag():
    mu = DiscreteMeasure.equally_spaced(1.0, 4)
    plain = montecarlo.mc_asian(GbmSpec(100.0, 0.3, 0.05), mu, 100.0, 200_000, seed=1)
    anti = montecarlo.mc_asian(GbmSpec(100.0, 0.3, 0.05), mu, 100.0, 200_000, seed=1, antithetic=True)
    assert abs(plain.mean - anti.mean) < 3 * math.hypot(plain.se, anti.se)
    with pytest.raises(ValueError):
        montecarlo.mc_asian(MODELS["VG"], mu, 100.0, 1000, seed=1, antithetic=True)
