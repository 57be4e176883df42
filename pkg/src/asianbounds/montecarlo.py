"""Seeded, chunked Monte Carlo used as the verification oracle.

Paths are split into fixed-size chunks.  Chunk ``i`` draws from its own Philox
stream keyed by ``(seed, i)``, and chunk statistics are merged in chunk order,
so results depend only on ``(paths, seed, chunk_size)`` and never on the number
of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .models import BM, NIG, VG, DiscreteMeasure, GbmSpec, LevySpec, Merton

CHUNK_PATHS = 1 << 15
WORKERS_ENV = "ASIANBOUNDS_WORKERS"


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    se: float
    paths: int
    seed: int
    chunk_layout: tuple = ()
    diag: dict = field(default_factory=dict, compare=False)

    def interval(self, k: float = 3.0):
        return self.mean - k * self.se, self.mean + k * self.se


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for chunk ``index``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def chunk_layout(paths: int, chunk_size: int = CHUNK_PATHS) -> list:
    full, rest = divmod(int(paths), chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run(sampler: Callable, paths: int, seed: int, chunk_size: int = CHUNK_PATHS,
        workers: int | None = None) -> MCEstimate:
    """Estimate ``E sampler(...)`` from ``paths`` draws.

    ``sampler(rng, n)`` returns ``n`` per-path values, or an ``(n, k)`` array for
    ``k`` statistics estimated jointly (then ``mean`` and ``se`` are arrays).
    """
    if paths < 2:
        raise ValueError("need at least two paths")
    sizes = chunk_layout(paths, chunk_size)
    workers = workers or default_workers()

    def one(item):
        i, n = item
        return _stats(sampler(chunk_rng(seed, i), n))

    items = list(enumerate(sizes))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, items))
    else:
        parts = [one(it) for it in items]
    return _merge(parts, seed, (chunk_size, len(sizes)))


def _stats(x):
    x = np.asarray(x, dtype=float)
    mean = x.mean(axis=0)
    return x.shape[0], mean, ((x - mean) ** 2).sum(axis=0)


def _merge(parts, seed, layout) -> MCEstimate:
    # ordered pairwise (Chan et al.) merge keeps the reduction deterministic
    n_tot, mean, m2 = parts[0]
    for n, mu, s in parts[1:]:
        tot = n_tot + n
        delta = mu - mean
        mean = mean + delta * (n / tot)
        m2 = m2 + s + delta**2 * (n_tot * n / tot)
        n_tot = tot
    se = np.sqrt(m2 / (n_tot - 1) / n_tot)
    if np.ndim(mean) == 0:
        mean, se = float(mean), float(se)
    return MCEstimate(mean, se, int(n_tot), int(seed), layout)


# ---------------------------------------------------------------------------
# Path simulation
# ---------------------------------------------------------------------------

def _as_levy(model) -> LevySpec:
    return model.as_levy() if isinstance(model, GbmSpec) else model


def sim_levy_increments(model, dt, rng: np.random.Generator, n: int, antithetic: bool = False) -> np.ndarray:
    """Increments of ``Z = ln(S/S0)`` over intervals ``dt``; shape ``(n, len(dt))``."""
    model = _as_levy(model)
    proc = model.process
    dt = np.asarray(dt, dtype=float)
    shape = (n, dt.size)
    if antithetic:
        if not isinstance(proc, BM) or n % 2:
            raise ValueError("antithetic sampling needs a Brownian model and an even path count")
        half = rng.standard_normal((n // 2, dt.size))
        g = np.concatenate([half, -half])
    else:
        g = rng.standard_normal(shape)
    if isinstance(proc, BM):
        x = proc.sigma * np.sqrt(dt) * g
    elif isinstance(proc, VG):
        tau = rng.gamma(dt / proc.nu, proc.nu, size=shape)
        x = proc.theta * tau + proc.sigma * np.sqrt(tau) * g
    elif isinstance(proc, NIG):
        gamma = math.sqrt(proc.alpha**2 - proc.beta**2)
        tau = rng.wald(proc.delta * dt / gamma, (proc.delta * dt) ** 2, size=shape)
        x = proc.beta * tau + np.sqrt(tau) * g
    elif isinstance(proc, Merton):
        counts = rng.poisson(proc.lam * dt, size=shape)
        jumps = counts * proc.mu_j + proc.delta_j * np.sqrt(counts) * rng.standard_normal(shape)
        x = proc.sigma * np.sqrt(dt) * g + jumps
    else:  # pragma: no cover
        raise TypeError(f"unsupported process {type(proc).__name__}")
    return x + model.drift * dt


def sim_levy_path(model, times, rng: np.random.Generator, n: int, antithetic: bool = False) -> np.ndarray:
    """``Z_{t_j}`` on an ascending schedule, shape ``(n, len(times))``."""
    dt = np.diff(np.asarray(times, dtype=float), prepend=0.0)
    return np.cumsum(sim_levy_increments(model, dt, rng, n, antithetic), axis=1)


def estimate(payoff: Callable, model, mu: DiscreteMeasure, paths: int, seed: int, **kw) -> MCEstimate:
    """Monte Carlo mean of ``payoff(S)`` where ``S`` holds prices at ``mu.times``.

    The payoff is responsible for its own discounting.
    """
    lm = _as_levy(model)

    def sampler(rng, n):
        return payoff(lm.s0 * np.exp(sim_levy_path(lm, mu.times, rng, n)))

    return run(sampler, paths, seed, **kw)


def mc_asian(model, mu: DiscreteMeasure, K: float, paths: int, seed: int,
             antithetic: bool = False, **kw) -> MCEstimate:
    """Fixed-strike arithmetic Asian call."""
    lm = _as_levy(model)
    disc = math.exp(-lm.r * mu.T)

    def sampler(rng, n):
        S = lm.s0 * np.exp(sim_levy_path(lm, mu.times, rng, n, antithetic))
        return disc * np.maximum(S @ mu.weights - K, 0.0)

    return run(sampler, paths, seed, **kw)


def mc_asian_delta(model, mu: DiscreteMeasure, K: float, paths: int, seed: int,
                   h: float = 1e-4, **kw) -> MCEstimate:
    """Central-difference delta with common random numbers across the bumps."""
    lm = _as_levy(model)
    disc = math.exp(-lm.r * mu.T)

    def sampler(rng, n):
        avg = np.exp(sim_levy_path(lm, mu.times, rng, n)) @ mu.weights
        up = np.maximum(lm.s0 * (1 + h) * avg - K, 0.0)
        dn = np.maximum(lm.s0 * (1 - h) * avg - K, 0.0)
        return disc * (up - dn) / (2 * h * lm.s0)

    return run(sampler, paths, seed, **kw)


def asian_ub_objective(model, mu: DiscreteMeasure, K: float, paths: int, seed: int,
                       chunk_size: int = CHUNK_PATHS):
    """``a -> (value, se)`` for the shifted-payoff upper bound with proxy ``H = s0 ln(S/s0)``.

    Paths are simulated once per chunk and reused for every ``a`` (common random
    numbers), so the objective is a deterministic convex function of ``a``.
    """
    lm = _as_levy(model)
    disc = math.exp(-lm.r * mu.T)
    w = mu.weights
    sizes = chunk_layout(paths, chunk_size)
    chunks = []
    for i, n in enumerate(sizes):
        Z = sim_levy_path(lm, mu.times, chunk_rng(seed, i), n)
        H = lm.s0 * Z
        chunks.append((lm.s0 * np.exp(Z) - K, (H @ w)[:, None] - H))

    def obj(a):
        parts = [_stats(disc * (np.maximum(base + a * dev, 0.0) @ w)) for base, dev in chunks]
        est = _merge(parts, seed, (chunk_size, len(sizes)))
        return est.mean, est.se

    return obj


ModelLike = Union[GbmSpec, LevySpec]
