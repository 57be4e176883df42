"""Lower bounds for fixed-strike Asian calls under exponential Levy models.

The proxy is the average log-return ``Y = <Z, mu>``.  With ``X_m = Z_{t_m}`` and
``k = K / S0`` the bound is

    LB = e^{-rT} S0 sup_z sum_m w_m E[(e^{X_m} - k) 1{Y > z}],

evaluated from the joint characteristic function of ``(X_m, Y)``.  The optimal
threshold solves a first-order condition built from one-dimensional Fourier
integrals; the value at that threshold is a damped two-dimensional Fourier
integral.  A second route (real-space integration over ``x`` of the
Fourier-inverted marginal) is provided for validation.

All infinite Fourier ranges are mapped onto ``(-1, 1)`` with a tangent change of
variables and integrated by Gauss-Legendre, which copes with both Gaussian and
algebraic (variance gamma) decay.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import montecarlo
from .bounds_core import maximize_lb, minimize_ub
from .errors import NoRoot, RouteMismatch, SlowDecay, ValidationError
from .models import (BoundResult, ContinuousUniform, DiscreteMeasure, LevySpec, check_strip,
                     cmo_discretize)

BRACKET_SD = 8.0
FD_BUMP = 1e-4
DECAY_TOL = 1e-10
ROUTE_TOL = 1e-5
PANELS = 8


@dataclass(frozen=True)
class DampingParams:
    alpha1: float = 0.75
    alpha2: float = -1.75
    beta: float = -1.0

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 < -1 and self.beta < 0):
            raise ValidationError("damping needs alpha1 > 0, alpha2 < -1, beta < 0")


@dataclass(frozen=True)
class FourierGrid:
    """Gauss-Legendre node counts for the mapped Fourier integrals.

    ``scale_xi`` / ``scale_zeta`` set the tangent-map width in units of the inverse
    standard deviation of ``Z_T`` / ``Y`` (1.0 is a good default).
    """

    n_xi: int = 512
    n_zeta: int = 512
    n_1d: int = 2048
    scale_xi: float = 1.0
    scale_zeta: float = 1.0

    def __post_init__(self):
        for n in (self.n_xi, self.n_zeta, self.n_1d):
            if n < 256 or n & (n - 1):
                raise ValidationError("Fourier node counts must be powers of two >= 256")


def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def half_line_nodes(n: int, scale: float):
    """Nodes/weights on ``(0, inf)`` via ``u = scale * tan(pi (t + 1) / 4)``."""
    t, w = _legendre(n)
    ang = 0.25 * math.pi * (t + 1.0)
    return scale * np.tan(ang), w * scale * 0.25 * math.pi / np.cos(ang) ** 2


def full_line_nodes(n: int, scale: float):
    """Nodes/weights on the real line via ``u = scale * tan(pi t / 2)``."""
    t, w = _legendre(n)
    ang = 0.5 * math.pi * t
    return scale * np.tan(ang), w * scale * 0.5 * math.pi / np.cos(ang) ** 2


# ---------------------------------------------------------------------------
# characteristic-function building blocks
# ---------------------------------------------------------------------------

def _as_discrete(mu, n_cmo=None):
    if isinstance(mu, ContinuousUniform):
        return cmo_discretize(mu, n_cmo or 512, rule="midpoint")
    if not isinstance(mu, DiscreteMeasure):
        raise ValidationError("Levy Asian bounds need a discrete or continuous-uniform measure")
    return mu


def _avg_moments(model: LevySpec, mu: DiscreteMeasure):
    """Mean and standard deviation of ``Y = <Z, mu>``."""
    W = mu.tail_weights
    mean = model.mean * float(mu.dt @ W)
    var = model.variance * float(mu.dt @ W**2)
    return mean, math.sqrt(var)


def _cf_per_date(model: LevySpec, mu: DiscreteMeasure, x, y):
    """Yield ``phi(x, y; t_m)`` for m = 1..N with a shared prefix-sum recursion.

    ``x`` and ``y`` broadcast together; each step costs one pair of exponent
    evaluations instead of N.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    W, dt = mu.tail_weights, mu.dt
    base = np.zeros(y.shape, dtype=complex)
    for dtk, wk in zip(dt, W):
        base += dtk * model.exponent(y * wk)
    acc = base
    for dtk, wk in zip(dt, W):
        yw = y * wk
        acc = acc + dtk * (model.exponent(x + yw) - model.exponent(yw))
        yield np.exp(acc)


def weighted_cf(model: LevySpec, mu: DiscreteMeasure, x, y):
    """``sum_m w_m phi(x, y; t_m)``."""
    out = 0.0
    for wm, phi in zip(mu.weights, _cf_per_date(model, mu, x, y)):
        out = out + wm * phi
    return out


def validate_damping(model: LevySpec, mu: DiscreteMeasure, damping: DampingParams) -> None:
    """Check eagerly that every shifted frequency stays in the strip."""
    W = mu.tail_weights
    for alpha in (damping.alpha1, damping.alpha2):
        check_strip(model.process, 1j * (alpha + damping.beta * W))
    check_strip(model.process, 1j * damping.beta * W)


def _check_decay(values, what):
    tail = float(np.max(np.abs(values[-4:])))
    if not np.isfinite(tail) or tail > DECAY_TOL:
        raise SlowDecay(f"{what}: integrand {tail:.2e} at the end of the grid exceeds {DECAY_TOL:g}")


# ---------------------------------------------------------------------------
# one-dimensional transforms of the average
# ---------------------------------------------------------------------------

class _AverageTransforms:
    """Cached 1-D Fourier data for ``Y = <Z, mu>`` (plain and exp-tilted)."""

    def __init__(self, model: LevySpec, mu: DiscreteMeasure, grid: FourierGrid):
        self.model, self.mu = model, mu
        self.mean, self.sd = _avg_moments(model, mu)
        self.zeta, self.wz = half_line_nodes(grid.n_1d, grid.scale_zeta / self.sd)
        zeta = self.zeta
        phis = list(_cf_per_date(model, mu, 0.0, zeta))
        self.cf_avg = phis[-1]                  # phi(0, zeta; T)
        tilted = list(_cf_per_date(model, mu, -1j, zeta))
        self.cf_tilt = sum(w * p for w, p in zip(mu.weights, tilted))   # sum_m w_m phi(-i, zeta; t_m)
        self.fwd = float(mu.weights @ np.exp((model.r - model.q) * mu.times))
        _check_decay(self.cf_avg * self.wz, "density of the average")
        _check_decay(self.cf_tilt * self.wz, "tilted density of the average")

    def _re_inv(self, cf, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        kern = np.exp(-1j * np.outer(z, self.zeta))
        return (kern * cf).real @ self.wz / math.pi

    def density(self, z):
        return self._re_inv(self.cf_avg, z)

    def tilted_density(self, z):
        """``d/dz`` of ``-sum_m w_m E[e^{X_m} 1{Y > z}]``."""
        return self._re_inv(self.cf_tilt, z)

    def _tail(self, cf, total, z):
        # Gil-Pelaez: P(Y > z) = 1/2 + (1/pi) int_0^inf Im(e^{-i zeta z} phi(zeta)) / zeta
        z = np.atleast_1d(np.asarray(z, dtype=float))
        kern = np.exp(-1j * np.outer(z, self.zeta))
        return 0.5 * total + ((kern * cf).imag @ (self.wz / self.zeta)) / math.pi

    def objective(self, z, k):
        """``sum_m w_m E[(e^{X_m} - k) 1{Y > z}]`` (undiscounted, per unit S0)."""
        return self._tail(self.cf_tilt, self.fwd, z) - k * self._tail(self.cf_avg, 1.0, z)


def density_avg(model: LevySpec, mu, z, grid: FourierGrid = FourierGrid()):
    """Density of ``<Z, mu>`` at ``z`` by Fourier inversion."""
    return _AverageTransforms(model, _as_discrete(mu), grid).density(z)


def optimal_z(model: LevySpec, mu, K: float, S0: float | None = None,
              grid: FourierGrid = FourierGrid(), _tr: _AverageTransforms | None = None) -> float:
    """Root of the first-order condition for the threshold.

    Solves ``sum_m w_m f~_m(z) = (K / S0) f(z)`` where ``f`` is the density of the
    average and ``f~_m`` its density under the ``e^{X_m}`` tilt.  Among the sign
    changes over ``mean +- 8 sd`` the one with the largest objective is refined
    to ``|dz| < 1e-10``.
    """
    mu = _as_discrete(mu)
    S0 = model.s0 if S0 is None else S0
    if K <= 0:
        raise NoRoot("nonpositive strike: objective increases to the lower bracket edge")
    k = K / S0
    tr = _tr or _AverageTransforms(model, mu, grid)
    lo, hi = tr.mean - BRACKET_SD * tr.sd, tr.mean + BRACKET_SD * tr.sd
    zs = np.linspace(lo, hi, 257)

    def g(z):
        return tr.tilted_density(z) - k * tr.density(z)

    gz = g(zs)
    scale = np.max(np.abs(gz))
    cand = [i for i in range(zs.size - 1)
            if gz[i] < 0 <= gz[i + 1] and max(-gz[i], gz[i + 1]) > 1e-9 * scale]
    if not cand:
        raise NoRoot(f"first-order condition has no sign change on [{lo:.4g}, {hi:.4g}]")
    roots = [brentq(lambda z: float(g(z)[0]), zs[i], zs[i + 1], xtol=1e-12) for i in cand]
    vals = [float(tr.objective(z, k)[0]) for z in roots]
    return float(roots[int(np.argmax(vals))])


# ---------------------------------------------------------------------------
# two-dimensional damped Fourier value
# ---------------------------------------------------------------------------

def _panels(n, parts):
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _map_panels(fn, slices, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, slices))
    return [fn(s) for s in slices]


def _ridge_slope(mu: DiscreteMeasure) -> float:
    """Weighted ``Cov(X_m, Y) / Var(X_m)``; the same for every Levy model up to scale."""
    cov = np.cumsum(mu.dt * mu.tail_weights)
    return float(mu.weights @ (cov / mu.times))


def _eq16_terms(model, mu, k, z, damping, grid, workers=None):
    """The two damped double integrals (x < 0 and x > 0 branches), each over xi in R, zeta > 0."""
    _, sd_y = _avg_moments(model, mu)
    sd_x = math.sqrt(model.variance * mu.T)
    xi, wxi = full_line_nodes(grid.n_xi, grid.scale_xi / sd_x)
    zeta, wzeta = half_line_nodes(grid.n_zeta, grid.scale_zeta / sd_y)
    b = damping.beta
    hy = np.exp(z * (b + 1j * zeta)) / (b + 1j * zeta) * wzeta
    y = -zeta + 1j * b
    # shear xi = s - c zeta along the slowest-decay direction of the joint CF
    c = _ridge_slope(mu)
    out = []
    for alpha, sign in ((damping.alpha1, 1.0), (damping.alpha2, -1.0)):

        def panel(sl, alpha=alpha, sign=sign):
            xs = xi[sl, None] - c * zeta[None, :]
            hx = sign * (k / (alpha + 1j * xs) - 1.0 / (alpha + 1.0 + 1j * xs)) * wxi[sl, None]
            phi = weighted_cf(model, mu, -xs + 1j * alpha, y[None, :])
            return ((hx * phi) @ hy).real.sum()

        parts = _map_panels(panel, _panels(xi.size, PANELS), workers)
        out.append(math.fsum(parts) / (2.0 * math.pi**2))
    return out


def _psi_terms(model, mu, k, z, damping, grid):
    """Validation route: ``sum_m w_m E[(e^{X_m} - k) 1{Y > z}]`` split at ``X_m = 0``.

    For each date, ``G(xi) = E[e^{i xi X_m} 1{Y > z}]`` comes from a zeta-damped
    inversion in ``y``, and ``G~(xi) = G(xi - i)`` is its exponential tilt.  The
    two halves then follow from Gil-Pelaez in ``x``::

        E[e^X 1{X > 0, Y > z}] = G~(0)/2 + (1/pi) int_0^inf Im G~(xi) / xi dxi

    and likewise for the probability, with the sign of the integral flipped for
    ``X < 0``.  No damping in ``x`` is involved.
    """
    b = damping.beta
    _, sd_y = _avg_moments(model, mu)
    zeta, wzeta = full_line_nodes(grid.n_zeta, grid.scale_zeta / sd_y)
    kz = -np.exp(z * (b + 1j * zeta)) / (b + 1j * zeta) * wzeta / (2 * math.pi)
    y = -zeta + 1j * b
    check_strip(model.process, 1j * (1.0 + b * mu.tail_weights))
    psi_neg = psi_pos = 0.0
    for m in range(1, mu.n + 1):
        sd_x = math.sqrt(model.variance * mu.times[m - 1])
        xi, wxi = half_line_nodes(grid.n_xi, grid.scale_xi / sd_x)
        x = np.concatenate([[0.0], xi, [-1j], xi - 1j])
        G = _date_cf(model, mu, m, x[:, None], y[None, :]) @ kz
        n = xi.size
        g0, g, t0, gt = G[0].real, G[1:n + 1], G[n + 1].real, G[n + 2:]
        _check_decay(g.imag / xi * wxi, "x-marginal transform")
        _check_decay(gt.imag / xi * wxi, "tilted x-marginal transform")
        ip = (g.imag / xi) @ wxi / math.pi
        it = (gt.imag / xi) @ wxi / math.pi
        wm = mu.weights[m - 1]
        psi_neg += wm * ((0.5 * t0 - it) - k * (0.5 * g0 - ip))
        psi_pos += wm * ((0.5 * t0 + it) - k * (0.5 * g0 + ip))
    return psi_neg, psi_pos


def _date_cf(model, mu, m, x, y):
    """``phi(x, y; t_m)`` without the strip check."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    acc = np.zeros(x.shape, dtype=complex)
    for k_, (dtk, wk) in enumerate(zip(mu.dt, mu.tail_weights)):
        u = y * wk + (x if k_ < m else 0.0)
        acc += dtk * model.exponent(u)
    return np.exp(acc)


def lb_levy(model: LevySpec, mu, K: float, S0: float | None = None,
            damping: DampingParams = DampingParams(), grid: FourierGrid = FourierGrid(),
            cross_check: bool = False, n_cmo: int = 512, workers: int | None = None) -> BoundResult:
    """Asian-call lower bound under an exponential Levy model.

    Continuous averaging is replaced by ``n_cmo`` midpoint dates.  With
    ``cross_check=True`` the real-space validation route is evaluated too and
    :class:`RouteMismatch` is raised if the two differ by more than 1e-5.
    """
    mu = _as_discrete(mu, n_cmo)
    S0 = model.s0 if S0 is None else S0
    if K < 0:
        raise ValidationError("strike must be nonnegative")
    validate_damping(model, mu, damping)
    k = K / S0
    disc = math.exp(-model.r * mu.T) * S0
    tr = _AverageTransforms(model, mu, grid)
    diag = {"damping": (damping.alpha1, damping.alpha2, damping.beta), "dates": mu.n}
    lo, hi = tr.mean - BRACKET_SD * tr.sd, tr.mean + BRACKET_SD * tr.sd
    try:
        z = optimal_z(model, mu, K, S0, grid, _tr=tr)
        diag["threshold_method"] = "first-order condition"
    except NoRoot:
        res = maximize_lb(lambda zz: float(tr.objective(zz, k)[0]), (lo, hi))
        z = res.optimizer
        diag["threshold_method"] = "scan fallback"
    neg, pos = _eq16_terms(model, mu, k, z, damping, grid, workers)
    value = disc * (neg + pos)
    diag.update(branch_neg=disc * neg, branch_pos=disc * pos,
                objective_1d=disc * float(tr.objective(z, k)[0]))
    if cross_check:
        pn, pp = _psi_terms(model, mu, k, z, damping, grid)
        pn, pp = float(pn), float(pp)
        alt = disc * (pn + pp)
        diag.update(psi_route=alt, psi_neg=disc * pn, psi_pos=disc * pp)
        if abs(alt - value) > ROUTE_TOL:
            raise RouteMismatch(f"Fourier value {value:.8f} vs real-space route {alt:.8f}")
    return BoundResult(float(value), float(z), diag)


def lb_objective(model: LevySpec, mu, K: float, S0: float | None = None,
                 grid: FourierGrid = FourierGrid()):
    """Discounted objective ``z -> LB(z)`` (Gil-Pelaez form) and its natural bracket."""
    mu = _as_discrete(mu)
    S0 = model.s0 if S0 is None else S0
    tr = _AverageTransforms(model, mu, grid)
    disc = math.exp(-model.r * mu.T) * S0
    k = K / S0
    bracket = (tr.mean - BRACKET_SD * tr.sd, tr.mean + BRACKET_SD * tr.sd)
    return (lambda z: disc * float(tr.objective(z, k)[0])), bracket


def delta_levy(model: LevySpec, mu, K: float, S0: float | None = None,
               damping: DampingParams = DampingParams(), grid: FourierGrid = FourierGrid(),
               h: float = FD_BUMP, **kw) -> float:
    """Central-difference delta of the lower bound, threshold re-solved per bump."""
    S0 = model.s0 if S0 is None else S0
    up = lb_levy(model, mu, K, S0 * (1 + h), damping, grid, **kw).value
    dn = lb_levy(model, mu, K, S0 * (1 - h), damping, grid, **kw).value
    return (up - dn) / (2 * h * S0)


def ub_levy(model: LevySpec, mu, K: float, paths: int = 100_000, seed: int = 0,
            bracket=(0.0, 3.0)) -> BoundResult:
    """Monte Carlo upper bound with proxy ``H = s0 Z``."""
    mu = _as_discrete(mu)
    obj = montecarlo.asian_ub_objective(model, mu, K, paths, seed)
    return minimize_ub(obj, bracket)


__all__ = [
    "DampingParams", "FourierGrid", "density_avg", "optimal_z", "lb_levy", "lb_objective",
    "delta_levy", "ub_levy", "weighted_cf", "validate_damping", "full_line_nodes", "half_line_nodes",
]
