"""Pausing-time laws, jump counts N_s and the factors a(k, n, s), a_k(t).

The one-sided stable law with exponent alpha is normalized so that its
Laplace transform is exp(-s**alpha / cos(pi alpha / 2)); at alpha = 1/2 this
is exp(-sqrt(2 s)), the law of 1/Z**2 for a standard normal Z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "Exponential",
    "Gamma",
    "OneSidedStable",
    "ClockMode",
    "sample_waiting",
    "count_jumps",
    "jump_counts",
    "a_exact",
    "a_limit",
    "a_stable_gauss",
    "a_half_closed",
]


class PausingTime:
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Exponential(PausingTime):
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mean must be positive")

    @property
    def mean(self) -> float:
        return self.m

    def sample(self, rng, size):
        return rng.exponential(self.m, size)


@dataclass(frozen=True)
class Gamma(PausingTime):
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    def sample(self, rng, size):
        return rng.gamma(self.shape, self.scale, size)


@dataclass(frozen=True)
class OneSidedStable(PausingTime):
    alpha: float = 0.5

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def laplace(self, s: float) -> float:
        return math.exp(-(s**self.alpha) / math.cos(math.pi * self.alpha / 2))

    def sample(self, rng, size):
        a = self.alpha
        if a == 0.5:
            z = rng.standard_normal(size)
            return 1.0 / (z * z)
        # Kanter's representation gives Laplace transform exp(-s^a)
        u = rng.uniform(0.0, math.pi, size)
        e = rng.exponential(1.0, size)
        x = (np.sin(a * u) / np.sin(u) ** (1 / a)) * (np.sin((1 - a) * u) / e) ** ((1 - a) / a)
        return x * (1 / math.cos(math.pi * a / 2)) ** (1 / a)


@dataclass(frozen=True)
class ClockMode:
    """Time scaling tau_n: n (diffusive) or n**(1/alpha) (stable)."""

    mode: str = "diffusive"
    alpha: float = 0.5

    def __post_init__(self):
        if self.mode not in ("diffusive", "stable"):
            raise ValueError(f"unknown clock mode {self.mode!r}")
        if self.mode == "stable" and not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def tau(self, n: int) -> float:
        return float(n) if self.mode == "diffusive" else float(n) ** (1 / self.alpha)


def sample_waiting(dist: PausingTime, rng: np.random.Generator) -> float:
    return float(dist.sample(rng, 1)[0])


def jump_counts(dist: PausingTime, times, rng: np.random.Generator) -> np.ndarray:
    """N_s for every s in ``times`` along one renewal sequence."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    horizon = float(times.max()) if times.size else 0.0
    arrivals = []
    total = 0.0
    batch = 64
    while total <= horizon:
        w = np.cumsum(dist.sample(rng, batch)) + total
        arrivals.append(w)
        total = float(w[-1])
        batch = min(batch * 2, 1 << 16)
    arr = np.concatenate(arrivals) if arrivals else np.empty(0)
    return np.searchsorted(arr, times, side="right")


def count_jumps(dist: PausingTime, s: float, rng: np.random.Generator) -> int:
    """One sample of N_s; N_0 = 0 since waiting times are a.s. positive."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return 0
    return int(jump_counts(dist, [s], rng)[0])


def a_exact(k: int, n: int, s: float, dist: PausingTime,
            rng: np.random.Generator | None = None, samples: int = 20000) -> tuple[float, float]:
    """a(k, n, s) = E[(1 - k/n)^{N_s}] as (value, standard error).

    Exact for the exponential law (Poisson generating function), Monte Carlo
    otherwise.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if s == 0 or k == 0:
        return 1.0, 0.0
    if isinstance(dist, Exponential):
        return math.exp(-k * s / (n * dist.m)), 0.0
    if rng is None:
        rng = np.random.default_rng(0)
    base = 1.0 - k / n
    vals = np.array([base ** count_jumps(dist, s, rng) for _ in range(samples)])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def a_limit(k: int, t: float, mode: str | ClockMode = "diffusive", m: float = 1.0,
            alpha: float = 0.5, tol: float = 1e-10) -> float:
    """Limit a_k(t) of a(k, n, t tau_n).

    Diffusive: exp(-k t / m). Stable: the integral over u in (0, inf),
    mapped to theta in (0, pi/2) by u = tan(theta) so the integrand is
    bounded.
    """
    if isinstance(mode, ClockMode):
        mode, alpha = mode.mode, mode.alpha
    if k < 1:
        raise ValueError("k must be >= 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if mode == "diffusive":
        return math.exp(-k * t / m)
    if mode != "stable":
        raise ValueError(f"unknown mode {mode!r}")
    if t == 0:
        return 1.0
    ca = math.cos(math.pi * alpha / 2)
    cpa = math.cos(math.pi * alpha)

    def f(th):
        u = math.tan(th)
        return math.exp(-t * (k * u * ca) ** (1 / alpha)) / (1 + math.sin(2 * th) * cpa)

    val, err = integrate.quad(f, 0.0, math.pi / 2, epsabs=tol, epsrel=tol, limit=500)
    if err > 10 * tol:
        raise RuntimeError(f"quadrature did not converge (k={k}, t={t}, err={err:.2e})")
    return math.sin(math.pi * alpha) / (math.pi * alpha) * val


def a_stable_gauss(k: int, t: float, tol: float = 1e-12) -> float:
    """alpha = 1/2 factor as a Gaussian average of exp(-k |x|) with variance t."""
    if t == 0:
        return 1.0
    f = lambda x: math.exp(-x * x / (2 * t) - k * x)
    val, _ = integrate.quad(f, 0.0, math.inf, epsabs=tol, epsrel=tol, limit=500)
    return 2 * val / math.sqrt(2 * math.pi * t)


def a_half_closed(k: int, t: float) -> float:
    """Closed form erfcx(k sqrt(t/2)) of the alpha = 1/2 factor."""
    return float(special.erfcx(k * math.sqrt(t / 2)))
