"""Options on the volume-weighted average price under a gamma-volume model.

Because the volume clock is a subordinator independent of the price, the
expected VWAP weights are the calendar fractions ``dt_j / T``.  By Jensen the
Asian lower bound on those weights bounds the VWAP option from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import montecarlo
from .gaussian_asian import GaussianAsianScenario, lb_dmo
from .models import BoundResult, DiscreteMeasure, GammaVolumeSpec, GbmSpec, LevySpec
from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class VwapScenario:
    price: Union[GbmSpec, LevySpec]
    volume: GammaVolumeSpec
    times: np.ndarray
    K: float
    independent: bool = True

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        if not self.independent:
            raise ValidationError("only price/volume independence is supported")
        if t.size < 1 or t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise ValidationError("VWAP schedule must be ascending in (0, T]")
        if self.K < 0:
            raise ValidationError("strike must be nonnegative")
        object.__setattr__(self, "times", t)

    @property
    def T(self) -> float:
        return float(self.times[-1])


def expected_measure(sc: VwapScenario) -> DiscreteMeasure:
    """Expected VWAP weights ``(t_j - t_{j-1}) / T``; independent of the gamma parameters."""
    dt = np.diff(sc.times, prepend=0.0)
    w = dt / sc.T
    return DiscreteMeasure(sc.times, w / w.sum())


def lb_vwap(sc: VwapScenario, **levy_kw) -> BoundResult:
    """Lower bound for the VWAP call via the Asian bound on the expected measure."""
    mu = expected_measure(sc)
    if isinstance(sc.price, GbmSpec):
        return lb_dmo(GaussianAsianScenario(sc.price, mu, sc.K))
    from .levy_asian import lb_levy

    return lb_levy(sc.price, mu, sc.K, sc.price.s0, **levy_kw)


def sample_volumes(volume: GammaVolumeSpec, dt, rng: np.random.Generator, n: int):
    """Gamma volume increments per interval; paths whose volumes all underflow are redrawn."""
    shapes = volume.shapes(dt)
    U = rng.gamma(shapes, 1.0 / volume.beta, size=(n, shapes.size))
    redrawn = 0
    bad = np.flatnonzero(U.sum(axis=1) <= 0.0)
    while bad.size:
        redrawn += bad.size
        U[bad] = rng.gamma(shapes, 1.0 / volume.beta, size=(bad.size, shapes.size))
        bad = bad[U[bad].sum(axis=1) <= 0.0]
    return U, redrawn


def mc_vwap(sc: VwapScenario, paths: int = 1_000_000, seed: int = 0, **kw) -> montecarlo.MCEstimate:
    """Monte Carlo VWAP call price: independent price paths and gamma volumes."""
    if paths < 10_000:
        raise ValidationError("mc_vwap needs at least 10^4 paths")
    model = sc.price.as_levy() if isinstance(sc.price, GbmSpec) else sc.price
    dt = np.diff(sc.times, prepend=0.0)
    disc = math.exp(-model.r * sc.T)
    redraws = []

    def sampler(rng, n):
        S = model.s0 * np.exp(montecarlo.sim_levy_path(model, sc.times, rng, n))
        U, redrawn = sample_volumes(sc.volume, dt, rng, n)
        redraws.append(redrawn)
        vwap = np.einsum("ij,ij->i", S, U) / U.sum(axis=1)
        return disc * np.maximum(vwap - sc.K, 0.0)

    est = montecarlo.run(sampler, paths, seed, **kw)
    est.diag["degenerate_volume_redraws"] = int(sum(redraws))
    return est


def mc_volume_fractions(volume: GammaVolumeSpec, times, paths: int, seed: int, **kw) -> montecarlo.MCEstimate:
    """Monte Carlo of ``U_{t_j} / V_T`` for every j (subordinator weight oracle)."""
    dt = np.diff(np.asarray(times, dtype=float), prepend=0.0)

    def sampler(rng, n):
        U, _ = sample_volumes(volume, dt, rng, n)
        return U / U.sum(axis=1, keepdims=True)

    return montecarlo.run(sampler, paths, seed, **kw)
