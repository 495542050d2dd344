"""Macroscopic evolution of free cumulants, R-transforms and Levy measures.

Two clocks are supported: "exponential" (a_k(t) = exp(-k t / m)) and
"stable_half" (the alpha = 1/2 factors). Stable-clock flows use a
Gauss-Legendre rule on the half line for the Gaussian average over u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .freeprob import (
    CumulantSeq,
    DensityPart,
    LevyMeasure,
    LogNormalFlow,
    RSeries,
    StableSmoothedUniform,
    Uniform,
    levy_to_r,
    stieltjes,
)
from .groups import FiniteGroupTable, plancherel_weights
from .pausing import a_limit

__all__ = [
    "EvolutionSpec",
    "Preset",
    "PresetError",
    "a_factors",
    "evolve_cumulants",
    "r_transform_exponential",
    "r_transform_stable",
    "levy_flow_exponential",
    "levy_flow_stable",
    "ensemble_preset",
    "pde_residual",
    "taylor_coefficients",
    "half_line_rule",
    "CLOCKS",
]

CLOCKS = ("exponential", "stable_half")


def half_line_rule(n: int = 128, cut: float = 12.0):
    """Nodes u >= 0 and weights for E[g(|U|)], U standard normal.

    The kink of |u| at 0 is avoided by folding onto the half line.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * cut * (x + 1)
    wt = 0.5 * cut * w * 2 * np.exp(-u * u / 2) / math.sqrt(2 * math.pi)
    return u, wt


@dataclass
class EvolutionSpec:
    table: FiniteGroupTable
    initial: list  # per-irrep CumulantSeq
    clock: str = "exponential"
    m: float = 1.0
    levy: list | None = None  # per-irrep LevyMeasure
    r0: list | None = field(default=None, repr=False)  # per-irrep closed-form R(0, w)

    def __post_init__(self):
        if self.clock not in CLOCKS:
            raise ValueError(f"clock must be one of {CLOCKS}")
        if len(self.initial) != self.table.n_irreps:
            raise ValueError("need one cumulant sequence per irrep")
        for c in self.initial:
            if c[1] != 0:
                raise ValueError("initial R_1 must vanish")
        total = sum(float(c[2]) for c in self.initial)
        if abs(total - 1) > 1e-9:
            raise ValueError(f"initial R_2 must sum to 1 over irreps, got {total}")

    @property
    def sigma2(self) -> list[Fraction]:
        return list(plancherel_weights(self.table))

    @property
    def K(self) -> int:
        return max(c.K for c in self.initial)


def a_factors(spec: EvolutionSpec, t: float, kmax: int) -> list[float]:
    """[a_1(t), ..., a_kmax(t)] for the clock of ``spec``."""
    if spec.clock == "exponential":
        return [a_limit(k, t, "diffusive", m=spec.m) for k in range(1, kmax + 1)]
    return [a_limit(k, t, "stable", alpha=0.5) for k in range(1, kmax + 1)]


def evolve_cumulants(spec: EvolutionSpec, t: float) -> list[CumulantSeq]:
    """R_1(t) = 0, R_2(t) = (1 - a_1) sigma^2 + a_1 R_2, R_{k+1}(t) = a_k R_{k+1}."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = a_factors(spec, t, spec.K)
    out = []
    for c, s2 in zip(spec.initial, spec.sigma2):
        r = [0.0] * c.K
        if c.K >= 2:
            r[1] = (1 - a[0]) * float(s2) + a[0] * float(c[2])
        for k in range(2, c.K):
            r[k] = a[k - 1] * float(c[k + 1])
        out.append(CumulantSeq(tuple(r)))
    return out


def r_transform_exponential(spec: EvolutionSpec, t: float) -> list[RSeries]:
    """R(t, w) = (1 - q) sigma^2 w + R(0, q w) with q = exp(-t/m)."""
    if spec.clock != "exponential":
        raise ValueError("spec does not use the exponential clock")
    q = math.exp(-t / spec.m)
    out = []
    for z, (c, s2) in enumerate(zip(spec.initial, spec.sigma2)):
        r = [0.0] * c.K
        for k in range(1, c.K):
            r[k] = float(c[k + 1]) * q**k
        if c.K >= 2:
            r[1] += (1 - q) * float(s2)
        func = None
        if spec.r0 is not None:
            f0, s2f = spec.r0[z], float(s2)
            func = lambda w, f0=f0, s2f=s2f: (1 - q) * s2f * w + f0(q * w)
        out.append(RSeries(CumulantSeq(tuple(r)), func))
    return out


def r_transform_stable(spec: EvolutionSpec, t: float, nodes: int = 128) -> list[RSeries]:
    """Gaussian average over u of (1 - e) sigma^2 w + R(0, e w), e = exp(-sqrt(t)|u|)."""
    if spec.clock != "stable_half":
        raise ValueError("spec does not use the stable clock")
    u, wt = half_line_rule(nodes)
    e = np.exp(-math.sqrt(t) * u)
    out = []
    for z, (c, s2) in enumerate(zip(spec.initial, spec.sigma2)):
        s2f = float(s2)
        r = [0.0] * c.K
        for k in range(1, c.K):
            r[k] = float(np.sum(wt * e**k)) * float(c[k + 1])
        if c.K >= 2:
            r[1] += float(np.sum(wt * (1 - e))) * s2f
        f0 = spec.r0[z] if spec.r0 is not None else RSeries(c)

        def func(w, f0=f0, s2f=s2f):
            w = np.asarray(w, dtype=complex)
            ww = w[..., None]
            vals = (1 - e) * s2f * ww + f0(e * ww)
            return np.sum(wt * vals, axis=-1)

        out.append(RSeries(CumulantSeq(tuple(r)), func))
    return out


# --- Levy measures -------------------------------------------------------------

@dataclass(frozen=True)
class ScaledDensity(DensityPart):
    """x -> f(x / q) on the interval shrunk by q."""

    base: DensityPart
    q: float

    @property
    def lo(self):
        return self.base.lo * self.q

    @property
    def hi(self):
        return self.base.hi * self.q

    def breakpoints(self):
        return [p * self.q for p in self.base.breakpoints()]

    def pdf(self, x):
        return self.base.pdf(np.asarray(x, dtype=float) / self.q)


@dataclass(frozen=True)
class StableSmoothed(DensityPart):
    """g(x) = E[f(x e^{sqrt(t)|Y|})] for a density f, by quadrature over Y."""

    base: DensityPart
    t: float

    @property
    def lo(self):
        return min(self.base.lo, 0.0)

    @property
    def hi(self):
        return max(self.base.hi, 0.0)

    def breakpoints(self):
        return self.base.breakpoints() + [self.base.lo, self.base.hi]

    def pdf(self, x):
        u, wt = half_line_rule(200)
        x = np.asarray(x, dtype=float)
        vals = self.base.pdf(x[..., None] * np.exp(math.sqrt(self.t) * u))
        return np.sum(wt * vals, axis=-1)


@dataclass(frozen=True)
class FunctionDensity(DensityPart):
    lo: float
    hi: float
    f: Callable
    points: tuple = ()

    def breakpoints(self):
        return list(self.points)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        return np.where(inside, self.f(np.where(inside, x, 0.5 * (self.lo + self.hi))), 0.0)


def levy_flow_exponential(l0: LevyMeasure, t: float, m: float, sigma2) -> LevyMeasure:
    """(1 - q) sigma^2 delta_0 + q l0(dx / q), q = exp(-t/m)."""
    q = math.exp(-t / m)
    atoms = [(0.0, (1 - q) * float(sigma2))]
    for x, a in l0.atoms:
        atoms.append((q * x, q * a) if x != 0 else (0.0, q * a))
    dens = []
    for d in l0.densities:
        if isinstance(d, Uniform):
            dens.append(Uniform(q * d.lo, q * d.hi, d.height))
        else:
            dens.append(ScaledDensity(d, q))
    return LevyMeasure(atoms, dens)


def levy_flow_stable(l0: LevyMeasure, t: float, sigma2) -> LevyMeasure:
    """alpha = 1/2 flow: projection of phi(y) e^{-sqrt(t)|y|} l0(e^{sqrt(t)|y|} dx) dy."""
    if t == 0:
        return LevyMeasure(list(l0.atoms), list(l0.densities))
    a1 = a_limit(1, t, "stable", alpha=0.5)
    c0 = l0.atom_at(0) if any(x == 0 for x, _ in l0.atoms) else 0
    atoms = [(0.0, float(sigma2) * (1 - a1) + float(c0) * a1)]
    dens: list = []
    for x, a in l0.atoms:
        if x != 0 and a:
            dens.append(LogNormalFlow(float(x), float(a), t))
    for d in l0.densities:
        if isinstance(d, Uniform):
            if d.lo < 0 < d.hi:
                dens.append(StableSmoothedUniform(d.lo, 0.0, d.height, t))
                dens.append(StableSmoothedUniform(0.0, d.hi, d.height, t))
            else:
                dens.append(StableSmoothedUniform(d.lo, d.hi, d.height, t))
        else:
            dens.append(StableSmoothed(d, t))
    return LevyMeasure(atoms, dens)


# --- presets -------------------------------------------------------------------

class PresetError(ValueError):
    pass


@dataclass
class Preset:
    """Initial data of the P1/P2/P3 ensembles and their closed-form evolutions."""

    name: str
    table: FiniteGroupTable
    a: list
    b: list
    c: list
    r: float
    rp: float
    K: int = 8

    def _check(self):
        if self.name not in ("P1", "P2", "P3"):
            raise PresetError(f"unknown preset {self.name!r}")
        nz = self.table.n_irreps
        if not (len(self.a) == len(self.b) == len(self.c) == nz):
            raise PresetError("a, b, c need one entry per irrep")
        if not (self.r > 0 and self.rp > 0):
            raise PresetError("constraint violated: r > 0 and r' > 0")
        for z in range(nz):
            if self.a[z] < 0 or self.b[z] < 0 or self.c[z] < 0:
                raise PresetError(f"constraint violated: a, b, c >= 0 (irrep {z})")
            if self.a[z] + self.b[z] > self.c[z] + 1e-15:
                raise PresetError(f"constraint violated: a + b <= c (irrep {z})")
        if abs(sum(float(x) for x in self.c) - 1) > 1e-12:
            raise PresetError("constraint violated: sum of c equals 1")

    @property
    def sigma2(self) -> list[float]:
        return [float(w) for w in plancherel_weights(self.table)]

    # initial data
    def levy0(self) -> list[LevyMeasure]:
        out = []
        for z in range(self.table.n_irreps):
            a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
            rest = max(c - a - b, 0.0)  # a + b = c may round below zero
            if self.name == "P1":
                out.append(LevyMeasure([(0.0, self.sigma2[z])]))
            elif self.name == "P2":
                out.append(LevyMeasure([(0.0, rest), (a / self.r, a), (-b / self.rp, b)]))
            else:
                dens = []
                if b > 0:
                    dens.append(Uniform(-b / self.rp, 0.0, self.rp))
                if a > 0:
                    dens.append(Uniform(0.0, a / self.r, self.r))
                out.append(LevyMeasure([(0.0, rest)], dens))
        return out

    def r0(self) -> list[Callable]:
        out = []
        r, rp = self.r, self.rp
        for z in range(self.table.n_irreps):
            a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
            if self.name == "P1":
                s2 = self.sigma2[z]
                out.append(lambda w, s2=s2: s2 * np.asarray(w))
            elif self.name == "P2":
                out.append(lambda w, a=a, b=b, c=c: (c - a - b) * w + a * w / (1 - (a / r) * w)
                           + b * w / (1 + (b / rp) * w))
            else:
                out.append(lambda w, a=a, b=b, c=c: (c - a - b) * w - r * np.log(1 - a * w / r)
                           + rp * np.log(1 + b * w / rp))
        return out

    def spec(self, clock: str = "exponential", m: float = 1.0) -> EvolutionSpec:
        levy = self.levy0()
        init = [levy_to_r(l, self.K) for l in levy]
        return EvolutionSpec(self.table, init, clock=clock, m=m, levy=levy, r0=self.r0())

    # closed forms at time t
    def r_closed(self, t: float, clock: str = "exponential", m: float = 1.0) -> list[Callable]:
        """Closed-form R(t, w) per irrep."""
        r, rp = self.r, self.rp
        out = []
        if clock == "exponential":
            q = math.exp(-t / m)
            for z in range(self.table.n_irreps):
                a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
                s2 = self.sigma2[z]
                if self.name == "P1":
                    out.append(lambda w, s2=s2: s2 * np.asarray(w))
                elif self.name == "P2":
                    out.append(lambda w, a=a, b=b, c=c, s2=s2: ((1 - q) * s2 + (c - a - b) * q) * w
                               + a * q * w / (1 - (a / r) * q * w) + b * q * w / (1 + (b / rp) * q * w))
                else:
                    out.append(lambda w, a=a, b=b, c=c, s2=s2: ((1 - q) * s2 + (c - a - b) * q) * w
                               - r * np.log(1 - a * q * w / r) + rp * np.log(1 + b * q * w / rp))
            return out
        u, wt = half_line_rule()
        e = np.exp(-math.sqrt(t) * u)
        for z in range(self.table.n_irreps):
            a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
            s2 = self.sigma2[z]
            lin = float(np.sum(wt * ((1 - e) * s2 + (c - a - b) * e)))
            if self.name == "P1":
                out.append(lambda w, s2=s2: s2 * np.asarray(w))
            elif self.name == "P2":
                def f(w, a=a, b=b, lin=lin):
                    ww = np.asarray(w, dtype=complex)[..., None]
                    g = a * e * ww / (1 - (a / r) * e * ww) + b * e * ww / (1 + (b / rp) * e * ww)
                    return lin * np.asarray(w) + np.sum(wt * g, axis=-1)
                out.append(f)
            else:
                def f(w, a=a, b=b, lin=lin):
                    ww = np.asarray(w, dtype=complex)[..., None]
                    g = -r * np.log(1 - a * e * ww / r) + rp * np.log(1 + b * e * ww / rp)
                    return lin * np.asarray(w) + np.sum(wt * g, axis=-1)
                out.append(f)
        return out

    def levy_closed(self, t: float, clock: str = "exponential", m: float = 1.0) -> list[LevyMeasure]:
        """Closed-form Levy measure at time t per irrep."""
        r, rp = self.r, self.rp
        out = []
        if clock == "exponential":
            q = math.exp(-t / m)
            for z in range(self.table.n_irreps):
                a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
                s2 = self.sigma2[z]
                if self.name == "P1":
                    out.append(LevyMeasure([(0.0, s2)]))
                    continue
                d0 = max((1 - q) * s2 + (c - a - b) * q, 0.0)
                if self.name == "P2":
                    out.append(LevyMeasure([(0.0, d0), ((a / r) * q, a * q), (-(b / rp) * q, b * q)]))
                else:
                    dens = []
                    if b > 0:
                        dens.append(Uniform(-(b / rp) * q, 0.0, rp))
                    if a > 0:
                        dens.append(Uniform(0.0, (a / r) * q, r))
                    out.append(LevyMeasure([(0.0, d0)], dens))
            return out
        if t == 0:
            return self.levy0()
        u, wt = half_line_rule()
        e = np.exp(-math.sqrt(t) * u)
        st = math.sqrt(t)
        for z in range(self.table.n_irreps):
            a, b, c = (float(v[z]) for v in (self.a, self.b, self.c))
            s2 = self.sigma2[z]
            if self.name == "P1":
                out.append(LevyMeasure([(0.0, s2)]))
                continue
            d0 = max(float(np.sum(wt * ((1 - e) * s2 + (c - a - b) * e))), 0.0)
            dens = []
            if self.name == "P2":
                k = math.sqrt(2) / math.sqrt(math.pi * t)
                if b > 0:
                    dens.append(FunctionDensity(-b / rp, 0.0, lambda x, b=b: k * rp * np.exp(
                        -np.log(-rp * x / b) ** 2 / (2 * t))))
                if a > 0:
                    dens.append(FunctionDensity(0.0, a / r, lambda x, a=a: k * r * np.exp(
                        -np.log(r * x / a) ** 2 / (2 * t))))
            else:
                if b > 0:
                    dens.append(FunctionDensity(-b / rp, 0.0, lambda x, b=b: rp * (
                        ndtr(np.log(-b / (rp * x)) / st) - ndtr(np.log(-rp * x / b) / st))))
                if a > 0:
                    dens.append(FunctionDensity(0.0, a / r, lambda x, a=a: r * (
                        ndtr(np.log(a / (r * x)) / st) - ndtr(np.log(r * x / a) / st))))
            out.append(LevyMeasure([(0.0, d0)], dens))
        return out


def ensemble_preset(name: str, table: FiniteGroupTable, a=None, b=None, c=None,
                    r: float = 1.0, rp: float = 1.0, K: int = 8) -> Preset:
    """Build a P1/P2/P3 preset; P1 ignores a, b, c, r, r'.

    Missing a, b, c default to a = c = Plancherel weights, b = 0.
    """
    w = [float(x) for x in plancherel_weights(table)]
    if name == "P1":
        a, b, c = [0.0] * len(w), [0.0] * len(w), w
    else:
        c = list(c) if c is not None else w
        a = list(a) if a is not None else list(c)
        b = list(b) if b is not None else [0.0] * len(c)
    p = Preset(name, table, a, b, c, float(r), float(rp), K)
    p._check()
    return p


# --- PDE check -----------------------------------------------------------------

def pde_residual(spec: EvolutionSpec, t: float, z: complex, h: float = 1e-3, zeta: int = 0,
                 K: int | None = None) -> complex:
    """Residual of dG/dt = (1/(m G) - sigma^2 G / m) dG/dz + G / m by central differences.

    G is the Stieltjes transform of the evolved truncated cumulants.
    """
    if spec.clock != "exponential":
        raise ValueError("the PDE check applies to the exponential clock")
    if z.imag < 0.1:
        raise ValueError("Im z must be at least 0.1")
    if t - h < 0:
        raise ValueError("need t >= h for the central time difference")
    m = spec.m
    s2 = float(spec.sigma2[zeta])

    def G(tt, zz):
        c = evolve_cumulants(spec, tt)[zeta]
        if K is not None:
            c = CumulantSeq(c.r[:K])
        return stieltjes(c, zz)

    g = G(t, z)
    gt = (G(t + h, z) - G(t - h, z)) / (2 * h)
    gz = (G(t, z + h) - G(t, z - h)) / (2 * h)
    return gt - ((1 / (m * g) - s2 * g / m) * gz + g / m)


def taylor_coefficients(func: Callable, K: int, radius: float = 0.25, n: int = 128) -> np.ndarray:
    """First K Taylor coefficients at 0 of an analytic function via a circle FFT."""
    w = radius * np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.asarray(func(w), dtype=complex)
    coef = np.fft.fft(vals) / n
    return (coef[:K] / radius ** np.arange(K)).real
