"""Closed-form lower bounds for fixed-strike Asian calls under gBm.

The proxy is the (weighted) average of the driving Brownian motion.  Given the
proxy, each ``E[S_t 1{W > z}]`` is a shifted Gaussian probability, so the
bound reduces to a one-dimensional search over the threshold ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import montecarlo
from .bounds_core import gaussian_exp_indicator, maximize_lb, minimize_ub, norm_cdf
from .errors import ValidationError
from .models import BoundResult, ContinuousUniform, DiscreteMeasure, GbmSpec

GL_ORDER = 256
FD_BUMP = 1e-4
BRACKET_SD = 8.0


@dataclass(frozen=True)
class GaussianAsianScenario:
    model: GbmSpec
    mu: Union[DiscreteMeasure, ContinuousUniform]
    K: float

    def __post_init__(self):
        if self.K < 0:
            raise ValidationError("strike must be nonnegative")

    @property
    def T(self) -> float:
        return self.mu.T

    def bumped(self, factor: float) -> "GaussianAsianScenario":
        m = self.model
        return GaussianAsianScenario(GbmSpec(m.s0 * factor, m.sigma, m.r, m.q), self.mu, self.K)


def d_n(T: float, n: int) -> float:
    """Variance of the average of ``B`` over ``n`` equally spaced dates ending at ``T``."""
    return T / 3.0 * (1.0 + 3.0 / (2 * n) + 1.0 / (2 * n * n))


def proxy_moments(mu: DiscreteMeasure):
    """Variance of ``W = sum_j w_j B_{t_j}`` and ``Cov(B_{t_j}, W)`` for all j."""
    cov = mu.brownian_cov() @ mu.weights
    return float(mu.weights @ cov), cov


def _dmo_objective(sc: GaussianAsianScenario):
    m, mu = sc.model, sc.mu
    vW, cov = proxy_moments(mu)
    t, w = mu.times, mu.weights
    mG = math.log(m.s0) + (m.r - m.q - 0.5 * m.sigma**2) * t
    vG = m.sigma**2 * t
    disc = math.exp(-m.r * mu.T)
    sdW = math.sqrt(vW)

    def obj(z):
        asset = w @ gaussian_exp_indicator(mG, vG, 0.0, vW, m.sigma * cov, z)
        return disc * (asset - sc.K * norm_cdf(-z / sdW))

    return obj, sdW


def lb_dmo(sc: GaussianAsianScenario) -> BoundResult:
    """Lower bound for a discretely monitored Asian call."""
    if not isinstance(sc.mu, DiscreteMeasure):
        raise ValidationError("lb_dmo needs a discrete averaging measure")
    obj, sdW = _dmo_objective(sc)
    res = maximize_lb(obj, (-BRACKET_SD * sdW, BRACKET_SD * sdW))
    res.diag["proxy_variance"] = sdW**2
    return res


def _cmo_objective(sc: GaussianAsianScenario, order: int):
    m, T = sc.model, sc.mu.T
    x, wq = np.polynomial.legendre.leggauss(order)
    u = 0.5 * T * (x + 1.0)
    wu = 0.5 * wq  # du / T
    vW = T / 3.0
    cov = m.sigma * u * (1.0 - u / (2.0 * T))
    fwd = m.s0 * np.exp((m.r - m.q) * u)
    disc = math.exp(-m.r * T)
    sdW = math.sqrt(vW)

    def obj(z):
        asset = wu @ (fwd * norm_cdf((cov - z) / sdW))
        return disc * (asset - sc.K * norm_cdf(-z / sdW))

    return obj, sdW


def lb_cmo(sc: GaussianAsianScenario, order: int = GL_ORDER) -> BoundResult:
    """Lower bound for a continuously monitored Asian call (Gauss-Legendre in time)."""
    if not isinstance(sc.mu, ContinuousUniform):
        raise ValidationError("lb_cmo needs a continuous uniform measure")
    obj, sdW = _cmo_objective(sc, order)
    res = maximize_lb(obj, (-BRACKET_SD * sdW, BRACKET_SD * sdW))
    res.diag["gl_order"] = order
    return res


def lower_bound(sc: GaussianAsianScenario) -> BoundResult:
    return lb_cmo(sc) if isinstance(sc.mu, ContinuousUniform) else lb_dmo(sc)


def delta_fd(sc: GaussianAsianScenario, h: float = FD_BUMP) -> float:
    """Central finite-difference delta of the lower bound; ``z`` re-optimised per bump."""
    up = lower_bound(sc.bumped(1.0 + h)).value
    dn = lower_bound(sc.bumped(1.0 - h)).value
    return (up - dn) / (2.0 * h * sc.model.s0)


def ub_dmo(sc: GaussianAsianScenario, paths: int = 100_000, seed: int = 0,
           bracket=(0.0, 3.0)) -> BoundResult:
    """Monte Carlo upper bound with proxy ``H = s0 ln(S/s0)``, minimised over the scale."""
    if not isinstance(sc.mu, DiscreteMeasure):
        raise ValidationError("ub_dmo needs a discrete averaging measure")
    obj = montecarlo.asian_ub_objective(sc.model, sc.mu, sc.K, paths, seed)
    return minimize_ub(obj, bracket)
