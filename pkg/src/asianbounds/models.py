"""Model, measure and contract specifications.

Every Levy process is described by its driftless characteristic exponent
``psi0`` with ``E exp(i u X_1) = exp(psi0(u))``.  :class:`LevySpec` adds the
risk-neutral drift so that ``psi(-i) = r - q`` and ``S_t = S_0 exp(Z_t)`` has
the right forward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import CholeskyFailure, NonIntegrable, StripViolation, ValidationError

DEFAULT_CMO_NODES = 512


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class GbmSpec:
    """Geometric Brownian motion with continuous dividend yield."""

    s0: float
    sigma: float
    r: float
    q: float = 0.0

    def __post_init__(self):
        _require(self.s0 > 0, "s0 must be positive")
        _require(self.sigma > 0, "sigma must be positive")
        _require(self.q >= 0, "dividend yield q must be nonnegative")

    def as_levy(self) -> "LevySpec":
        return LevySpec(BM(self.sigma), r=self.r, s0=self.s0, q=self.q)


# ---------------------------------------------------------------------------
# Levy processes (driftless exponents)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BM:
    sigma: float

    def __post_init__(self):
        _require(self.sigma > 0, "BM sigma must be positive")

    def exponent0(self, u):
        return -0.5 * self.sigma**2 * u**2

    def strip(self):
        return -math.inf, math.inf

    @property
    def variance(self):
        return self.sigma**2

    @property
    def mean(self):
        return 0.0


@dataclass(frozen=True)
class VG:
    """Variance gamma: Brownian motion with drift ``theta`` run on a gamma clock."""

    sigma: float
    nu: float
    theta: float

    def __post_init__(self):
        _require(self.sigma > 0, "VG sigma must be positive")
        _require(self.nu > 0, "VG nu must be positive")

    def exponent0(self, u):
        s2, nu = self.sigma**2, self.nu
        return -np.log(1.0 - 1j * u * self.theta * nu + 0.5 * s2 * nu * u**2) / nu

    def strip(self):
        # 1 - theta*nu*p - sigma^2*nu*p^2/2 > 0 for real exponent p = -Im(u)
        s2 = self.sigma**2
        disc = math.sqrt(self.theta**2 + 2.0 * s2 / self.nu)
        return (-self.theta - disc) / s2, (-self.theta + disc) / s2

    @property
    def variance(self):
        return self.sigma**2 + self.theta**2 * self.nu

    @property
    def mean(self):
        return self.theta


@dataclass(frozen=True)
class NIG:
    """Normal inverse Gaussian with tail ``alpha``, skew ``beta``, scale ``delta``."""

    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        _require(self.alpha > abs(self.beta), "NIG requires alpha > |beta|")
        _require(self.delta > 0, "NIG delta must be positive")

    def exponent0(self, u):
        a2 = self.alpha**2
        gamma = math.sqrt(a2 - self.beta**2)
        return self.delta * (gamma - np.sqrt(a2 - (self.beta + 1j * u) ** 2))

    def strip(self):
        return -self.alpha - self.beta, self.alpha - self.beta

    @property
    def variance(self):
        gamma = math.sqrt(self.alpha**2 - self.beta**2)
        return self.delta * self.alpha**2 / gamma**3

    @property
    def mean(self):
        return self.delta * self.beta / math.sqrt(self.alpha**2 - self.beta**2)


@dataclass(frozen=True)
class Merton:
    """Brownian diffusion plus compound Poisson normal jumps."""

    sigma: float
    lam: float
    mu_j: float
    delta_j: float

    def __post_init__(self):
        _require(self.sigma >= 0, "Merton sigma must be nonnegative")
        _require(self.lam >= 0, "Merton jump intensity must be nonnegative")
        _require(self.delta_j >= 0, "Merton jump volatility must be nonnegative")

    def exponent0(self, u):
        jump = np.exp(1j * u * self.mu_j - 0.5 * self.delta_j**2 * u**2) - 1.0
        return -0.5 * self.sigma**2 * u**2 + self.lam * jump

    def strip(self):
        return -math.inf, math.inf

    @property
    def variance(self):
        return self.sigma**2 + self.lam * (self.mu_j**2 + self.delta_j**2)

    @property
    def mean(self):
        return self.lam * self.mu_j


LevyProcess = Union[BM, VG, NIG, Merton]


def check_strip(process: LevyProcess, u) -> None:
    """Raise :class:`StripViolation` unless every ``-Im(u)`` lies inside the strip."""
    lo, hi = process.strip()
    p = -np.imag(np.asarray(u))
    if p.size and (np.min(p) <= lo or np.max(p) >= hi):
        raise StripViolation(
            f"{type(process).__name__}: exponent -Im(u) in [{np.min(p):.4g}, {np.max(p):.4g}] "
            f"outside analyticity strip ({lo:.4g}, {hi:.4g})"
        )


@dataclass(frozen=True)
class LevySpec:
    """Risk-neutral exponential Levy model ``S_t = s0 exp(Z_t)``."""

    process: LevyProcess
    r: float
    s0: float = 100.0
    q: float = 0.0

    def __post_init__(self):
        _require(self.s0 > 0, "s0 must be positive")
        _require(self.q >= 0, "dividend yield q must be nonnegative")

    @cached_property
    def drift(self) -> float:
        return martingale_drift(self)

    def exponent(self, u):
        """Characteristic exponent including drift; no strip check."""
        u = np.asarray(u)
        return 1j * u * self.drift + self.process.exponent0(u)

    @property
    def variance(self) -> float:
        """Variance of Z_1."""
        return self.process.variance

    @property
    def mean(self) -> float:
        """Mean of Z_1."""
        return self.drift + self.process.mean


def martingale_drift(model: LevySpec) -> float:
    """Drift making ``exp(-(r - q) t) S_t`` a martingale."""
    lo, hi = model.process.strip()
    if not lo < 1.0 < hi:
        raise NonIntegrable(
            f"{type(model.process).__name__} has no finite exponential moment E exp(Z_1)"
        )
    log_mgf1 = complex(model.process.exponent0(-1j)).real
    return model.r - model.q - log_mgf1


def char_exponent(model: LevySpec, theta):
    """psi(theta) with ``E exp(i theta Z_1) = exp(psi(theta))``; validates the strip."""
    check_strip(model.process, theta)
    return model.exponent(theta)


# ---------------------------------------------------------------------------
# Averaging measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Atoms ``weights[j]`` at monitoring ``times[j]``; the last time is maturity."""

    times: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        _require(t.size >= 1, "measure needs at least one monitoring time")
        _require(t.shape == w.shape, "times and weights must have equal length")
        _require(t[0] > 0, "monitoring times must lie in (0, T]")
        _require(np.all(np.diff(t) > 0), "monitoring times must be strictly ascending")
        _require(np.all(w >= 0), "weights must be nonnegative")
        _require(abs(w.sum() - 1.0) <= 1e-12, f"weights must sum to 1 (got {w.sum()!r})")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "weights", w)

    @classmethod
    def equally_spaced(cls, T: float, n: int) -> "DiscreteMeasure":
        return cls(np.arange(1, n + 1) * (T / n), np.full(n, 1.0 / n))

    @classmethod
    def single(cls, T: float) -> "DiscreteMeasure":
        return cls(np.array([T]), np.array([1.0]))

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.times, prepend=0.0)

    @property
    def tail_weights(self) -> np.ndarray:
        """``W_k = sum_{j >= k} w_j``: loading of the k-th increment on the average."""
        return np.cumsum(self.weights[::-1])[::-1]

    @property
    def mean_time(self) -> float:
        return float(self.weights @ self.times)

    def brownian_cov(self) -> np.ndarray:
        return np.minimum.outer(self.times, self.times)


@dataclass(frozen=True)
class ContinuousUniform:
    """Uniform averaging ``du / T`` over ``[0, T]``."""

    T: float

    def __post_init__(self):
        _require(self.T > 0, "T must be positive")


@dataclass(frozen=True)
class GammaVolumeSpec:
    """Gamma subordinator for accumulated volume.

    ``V_t ~ Gamma(shape=alpha * t / time_unit, rate=beta)``; ``time_unit`` is the
    length in years of one unit of the volume clock (1.0 means the clock runs in
    years, ``1/252`` in trading days).
    """

    alpha: float
    beta: float
    time_unit: float = 1.0

    def __post_init__(self):
        _require(self.alpha > 0, "volume alpha must be positive")
        _require(self.beta > 0, "volume beta must be positive")
        _require(self.time_unit > 0, "volume time_unit must be positive")

    def shapes(self, dt):
        return self.alpha * np.asarray(dt) / self.time_unit


@dataclass(frozen=True, eq=False)
class VolumeWeighted:
    """Random VWAP measure: atoms at ``times`` weighted by traded volume."""

    times: np.ndarray
    volume: GammaVolumeSpec

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        _require(t.size >= 1 and t[0] > 0, "monitoring times must lie in (0, T]")
        _require(np.all(np.diff(t) > 0), "monitoring times must be strictly ascending")
        object.__setattr__(self, "times", t)

    @property
    def T(self) -> float:
        return float(self.times[-1])


AveragingMeasure = Union[DiscreteMeasure, ContinuousUniform, VolumeWeighted]


def cmo_discretize(mu: ContinuousUniform, n_quad: int = DEFAULT_CMO_NODES, rule: str = "right") -> DiscreteMeasure:
    """Replace continuous averaging by ``n_quad`` equal atoms.

    ``rule="right"`` puts the atoms at ``i T / n`` (the usual DMO grid);
    ``rule="midpoint"`` at ``(i - 1/2) T / n``, which converges to the
    continuous average at second order.
    """
    if n_quad < 2:
        raise ValidationError("n_quad must be at least 2")
    T = mu.T
    if rule == "right":
        times = np.arange(1, n_quad + 1) * (T / n_quad)
    elif rule == "midpoint":
        times = (np.arange(n_quad) + 0.5) * (T / n_quad)
    else:
        raise ValidationError(f"unknown discretisation rule {rule!r}")
    return DiscreteMeasure(times, np.full(n_quad, 1.0 / n_quad))


# ---------------------------------------------------------------------------
# Joint characteristic function
# ---------------------------------------------------------------------------

def joint_cf(model: LevySpec, mu: DiscreteMeasure, xi, zeta, m: int):
    """``E exp(i xi Z_{t_m} + i zeta <Z, mu>)`` for 1-based monitoring index ``m``.

    Uses independence of increments: the k-th increment enters with frequency
    ``xi 1{k <= m} + zeta W_k``.
    """
    if not 1 <= m <= mu.n:
        raise ValidationError(f"monitoring index m={m} outside 1..{mu.n}")
    xi, zeta = np.broadcast_arrays(np.asarray(xi, dtype=complex), np.asarray(zeta, dtype=complex))
    log_phi = np.zeros(xi.shape, dtype=complex)
    for k, (dt, wk) in enumerate(zip(mu.dt, mu.tail_weights)):
        u = zeta * wk + (xi if k < m else 0.0)
        check_strip(model.process, u)
        log_phi += dt * model.exponent(u)
    return np.exp(log_phi)


# ---------------------------------------------------------------------------
# Basket contract
# ---------------------------------------------------------------------------

def cholesky_psd(rho, tol: float = -1e-10) -> np.ndarray:
    """Lower Cholesky factor accepting pivots down to ``tol`` (clipped to zero)."""
    a = np.array(rho, dtype=float)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot < tol:
            raise CholeskyFailure(f"correlation matrix not positive semidefinite (pivot {pivot:.3e} at {j})")
        if pivot <= 0.0:
            continue
        L[j, j] = math.sqrt(pivot)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True, eq=False)
class BasketSpec:
    """Basket spread: long assets minus short assets minus strike at ``T``.

    Asset indices are 0-based.
    """

    s0: np.ndarray
    sigma: np.ndarray
    q: np.ndarray
    rho: np.ndarray
    r: float
    K: float
    T: float
    long_idx: tuple
    short_idx: tuple = ()

    def __post_init__(self):
        s0 = np.asarray(self.s0, dtype=float).ravel()
        n = s0.size
        sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), (n,)).copy()
        q = np.broadcast_to(np.asarray(self.q, dtype=float), (n,)).copy()
        rho = np.asarray(self.rho, dtype=float)
        long_idx = tuple(int(i) for i in self.long_idx)
        short_idx = tuple(int(i) for i in self.short_idx)
        _require(long_idx, "long leg must be nonempty")
        _require(not set(long_idx) & set(short_idx), "long and short index sets must be disjoint")
        _require(sorted(long_idx + short_idx) == list(range(n)), "long and short legs must partition the assets")
        _require(np.all(s0 > 0), "initial prices must be positive")
        _require(np.all(sigma >= 0), "volatilities must be nonnegative")
        _require(self.K >= 0, "strike must be nonnegative")
        _require(self.T > 0, "maturity must be positive")
        _require(rho.shape == (n, n), f"correlation matrix must be {n}x{n}")
        _require(np.allclose(rho, rho.T, atol=1e-12, rtol=0), "correlation matrix must be symmetric")
        _require(np.allclose(np.diag(rho), 1.0, atol=1e-12, rtol=0), "correlation matrix must have unit diagonal")
        try:
            chol = cholesky_psd(rho)
        except CholeskyFailure as exc:
            raise ValidationError(str(exc)) from None
        for name, val in [("s0", s0), ("sigma", sigma), ("q", q), ("rho", rho),
                          ("long_idx", long_idx), ("short_idx", short_idx), ("_chol", chol)]:
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.s0.size

    @property
    def sign(self) -> np.ndarray:
        """+1 on long assets, -1 on short assets."""
        s = -np.ones(self.n)
        s[list(self.long_idx)] = 1.0
        return s

    def with_strike(self, K: float) -> "BasketSpec":
        return BasketSpec(self.s0, self.sigma, self.q, self.rho, self.r, K, self.T,
                          self.long_idx, self.short_idx)


@dataclass
class BoundResult:
    """A priced bound with the optimiser location and numerical diagnostics."""

    value: float
    optimizer: float
    diag: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)
