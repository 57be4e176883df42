"""Basket-spread options under correlated gBm.

Freezing each asset's share of its leg at the initial value turns both legs
into single lognormals (the multi-asset Kirk approximation), priced with the
exchange-option formula.  The same frozen log-ratio serves as the proxy for a
threshold lower bound whose pieces are shifted Gaussian probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import montecarlo
from .bounds_core import maximize_lb, norm_cdf
from .errors import EmptyLongLeg
from .models import BasketSpec, BoundResult, cholesky_psd

BRACKET_SD = 8.0
DEGENERATE_VAR = 1e-14


@dataclass(frozen=True)
class FrozenLegs:
    sigma_tilde: np.ndarray   # long-leg loadings sigma_i S0_i e^{-q_i T} / F0 (0 on short assets)
    sigma_hat: np.ndarray     # short-leg loadings sigma_i S0_i e^{-q_i T} / P0 (0 on long assets)
    F0: float
    P0: float
    var_f: float
    var_p: float
    cov_fp: float

    @property
    def ln_f0(self):
        return math.log(self.F0)

    @property
    def ln_p0(self):
        return math.log(self.P0) if self.P0 > 0 else -math.inf

    @property
    def proxy_var(self):
        return max(self.var_f + self.var_p - 2.0 * self.cov_fp, 0.0)


def build_frozen(sc: BasketSpec) -> FrozenLegs:
    if not sc.long_idx:
        raise EmptyLongLeg("basket needs at least one long asset")
    a = sc.s0 * np.exp(-sc.q * sc.T)  # prepaid forwards
    long_ = np.zeros(sc.n, dtype=bool)
    long_[list(sc.long_idx)] = True
    F0 = float(a[long_].sum())
    P0 = float(a[~long_].sum() + sc.K * math.exp(-sc.r * sc.T))
    st = np.where(long_, sc.sigma * a / F0, 0.0)
    sh = np.where(~long_, sc.sigma * a / P0, 0.0) if P0 > 0 else np.zeros(sc.n)
    T, rho = sc.T, sc.rho
    return FrozenLegs(st, sh, F0, P0, float(T * st @ rho @ st), float(T * sh @ rho @ sh),
                      float(T * st @ rho @ sh))


def _exchange(F0, P0, s2):
    if P0 <= 0:
        return F0
    if s2 <= 0:
        return max(F0 - P0, 0.0)
    s = math.sqrt(s2)
    d1 = (math.log(F0 / P0) + 0.5 * s2) / s
    return float(F0 * norm_cdf(d1) - P0 * norm_cdf(d1 - s))


def lau_lo_price(sc: BasketSpec) -> float:
    """Frozen-weight approximation priced by the two-lognormal exchange formula."""
    fl = build_frozen(sc)
    return _exchange(fl.F0, fl.P0, fl.proxy_var)


def lb_basket(sc: BasketSpec) -> BoundResult:
    """Lower bound using ``X_T = ln F~_T - ln P^_T`` as the exercise proxy."""
    fl = build_frozen(sc)
    a = sc.s0 * np.exp(-sc.q * sc.T)
    sign = sc.sign
    disc_k = sc.K * math.exp(-sc.r * sc.T)
    vX = fl.proxy_var
    if vX < DEGENERATE_VAR or fl.P0 <= 0:
        intrinsic = max(float(sign @ a) - disc_k, 0.0)
        return BoundResult(intrinsic, -math.inf, {"degenerate_proxy": True})
    mX = fl.ln_f0 - fl.ln_p0 - 0.5 * (fl.var_f - fl.var_p)
    sd = math.sqrt(vX)
    # mean of X under the measure tilted by asset i
    shift = sc.T * sc.sigma * (sc.rho @ (fl.sigma_tilde - fl.sigma_hat))
    signed_a = sign * a

    def obj(z):
        return float(signed_a @ norm_cdf((mX + shift - z) / sd) - disc_k * norm_cdf((mX - z) / sd))

    res = maximize_lb(obj, (mX - BRACKET_SD * sd, mX + BRACKET_SD * sd))
    res.diag.update(proxy_mean=mX, proxy_var=vX)
    return res


def mc_basket(sc: BasketSpec, paths: int = 1_000_000, seed: int = 0, **kw) -> montecarlo.MCEstimate:
    """Monte Carlo of the discounted basket-spread payoff from correlated terminal values."""
    L = cholesky_psd(sc.rho)
    T = sc.T
    drift = (sc.r - sc.q - 0.5 * sc.sigma**2) * T
    vol = sc.sigma * math.sqrt(T)
    signed_s0 = sc.sign * sc.s0
    disc = math.exp(-sc.r * T)

    def sampler(rng, n):
        g = rng.standard_normal((n, sc.n)) @ L.T
        legs = np.exp(drift + vol * g) @ signed_s0
        return disc * np.maximum(legs - sc.K, 0.0)

    return montecarlo.run(sampler, paths, seed, **kw)
