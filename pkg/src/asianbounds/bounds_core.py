"""Generic machinery for the threshold lower bound and the shifted-payoff upper bound.

The lower bound maximises over a threshold ``z`` the discounted expectation
``E e^{-rT} <Y - K, mu> 1{<H, mu> > z}`` for a tractable proxy ``H``; the upper
bound minimises over a scale ``a`` the expectation of
``<(Y - K + a <H, mu> - a H)^+, mu>``.  Both become equalities when ``H = Y``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erfc

from .errors import BracketTooSmall, DegenerateW, FlatObjective
from .models import BoundResult

SCAN_POINTS = 64


def norm_cdf(x):
    """Standard normal CDF through ``erfc`` (accurate in both tails)."""
    return 0.5 * erfc(-np.asarray(x) / math.sqrt(2.0))


def gaussian_exp_indicator(mG, vG, mW, vW, cGW, z):
    """``E[e^G 1{W > z}]`` for jointly Gaussian ``(G, W)``.

    Tilting by ``e^G`` shifts the mean of ``W`` by ``Cov(G, W)``, so the result is
    ``exp(mG + vG/2) * Phi((mW + cGW - z) / sqrt(vW))``.  Broadcasts over arrays.
    """
    vW = np.asarray(vW, dtype=float)
    if np.any(vW <= 0):
        raise DegenerateW("variance of the conditioning variable must be positive")
    return np.exp(np.asarray(mG) + 0.5 * np.asarray(vG)) * norm_cdf((mW + cGW - z) / np.sqrt(vW))


def maximize_lb(obj: Callable[[float], float], bracket, n_scan: int = SCAN_POINTS,
                rtol: float = 1e-8, on_flat: str = "return") -> BoundResult:
    """Maximise a lower-bound objective over the threshold ``z``.

    A coarse scan of ``n_scan`` points guards against mild non-concavity; the
    best cell is refined by bounded Brent search to ``rtol * width``.  If the scan
    shows no variation (e.g. a zero payoff) the constant value is returned,
    or :class:`FlatObjective` raised when ``on_flat="raise"``.
    """
    lo, hi = map(float, bracket)
    width = hi - lo
    zs = np.linspace(lo, hi, n_scan)
    vals = np.array([obj(z) for z in zs], dtype=float)
    i = int(np.argmax(vals))
    spread = float(np.ptp(vals))
    diag = {"bracket": (lo, hi), "scan_points": n_scan, "scan_spread": spread}
    if spread < 1e-14:
        if on_flat == "raise":
            raise FlatObjective(f"objective varies by {spread:.2e} over {bracket}")
        diag.update(flat=True, iterations=0)
        return BoundResult(float(vals[i]), float(zs[i]), diag)
    a = zs[max(i - 1, 0)]
    b = zs[min(i + 1, n_scan - 1)]
    opt = minimize_scalar(lambda z: -obj(z), bounds=(a, b), method="bounded",
                          options={"xatol": rtol * width})
    z_opt, v_opt, it = float(opt.x), -float(opt.fun), int(opt.nfev)
    if v_opt < vals[i]:
        z_opt, v_opt = float(zs[i]), float(vals[i])
    diag.update(iterations=it, at_edge=i in (0, n_scan - 1))
    return BoundResult(float(v_opt), float(z_opt), diag)


def minimize_ub(obj: Callable[[float], tuple], bracket=(0.0, 3.0), tol: float = 1e-6) -> BoundResult:
    """Minimise a Monte Carlo upper-bound objective over the proxy scale ``a``.

    ``obj(a)`` returns ``(value, se)`` and must use common random numbers so that
    it is a smooth convex function of ``a``.  A minimum on the bracket edge
    triggers one symmetric expansion, then :class:`BracketTooSmall`.
    """
    lo, hi = map(float, bracket)
    expanded = False
    while True:
        opt = minimize_scalar(lambda a: obj(a)[0], bounds=(lo, hi), method="bounded", options={"xatol": tol})
        a_opt, it = float(opt.x), int(opt.nfev)
        val, se = obj(a_opt)
        at_lo = a_opt - lo < 10 * tol
        at_hi = hi - a_opt < 10 * tol
        if not (at_lo or at_hi):
            break
        if expanded:
            raise BracketTooSmall(f"minimum at bracket edge a={a_opt:.6g} of [{lo}, {hi}]")
        w = hi - lo
        lo, hi = (lo - w if at_lo else lo), (hi + w if at_hi else hi)
        expanded = True
    return BoundResult(float(val), float(a_opt), {"se": float(se), "iterations": it,
                                                  "bracket": (lo, hi), "expanded": expanded})


def ub_objective_from_samples(Y, H, weights, K, discount):
    """Upper-bound objective ``a -> (mean, se)`` on fixed simulated samples.

    ``Y`` and ``H`` are ``(paths, N)`` arrays of payoff process and proxy at the
    monitoring dates; sharing them across ``a`` gives common random numbers.
    """
    Y = np.asarray(Y, dtype=float)
    H = np.asarray(H, dtype=float)
    w = np.asarray(weights, dtype=float)
    dev = (H @ w)[:, None] - H

    def obj(a):
        x = discount * (np.maximum(Y - K + a * dev, 0.0) @ w)
        return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))

    return obj
