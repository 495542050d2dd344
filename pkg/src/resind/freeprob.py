"""Free cumulants, R-transforms, Levy measures and Stieltjes transforms.

R-transform convention: R(w) = sum_{k>=0} R_{k+1} w^k, so a measure with
Levy measure l has R(w) = int w / (1 - x w) l(dx) and the Stieltjes
transform solves z = R(G) + 1/G.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .groups import FiniteGroupTable, QComplex

__all__ = [
    "CumulantSeq",
    "RSeries",
    "LevyMeasure",
    "Uniform",
    "LogNormalFlow",
    "StableSmoothedUniform",
    "moments_to_cumulants",
    "cumulants_to_moments",
    "semicircle",
    "compress",
    "convolve",
    "levy_to_r",
    "stieltjes",
    "stieltjes_from_cumulants",
    "StieltjesError",
    "group_dualize",
    "MAX_ORDER",
]

MAX_ORDER = 16


# --- moment / cumulant series ---------------------------------------------------

def _power_coeffs(m: Sequence, kmax: int, nmax: int):
    """coef[k][j] = [z^j] M(z)^k with M(z) = 1 + sum_i m[i-1] z^i, j <= nmax."""
    base = [1] + list(m[:nmax])
    base += [0] * (nmax + 1 - len(base))
    coef = [[1] + [0] * nmax]
    for _ in range(kmax):
        prev = coef[-1]
        cur = [0] * (nmax + 1)
        for i, a in enumerate(prev):
            if a:
                for j in range(nmax + 1 - i):
                    cur[i + j] += a * base[j]
        coef.append(cur)
    return coef


def cumulants_to_moments(r: Sequence) -> list:
    """M_1..M_K from R_1..R_K via M_n = sum_k R_k [z^{n-k}] M(z)^k."""
    K = len(r)
    if K > MAX_ORDER:
        raise ValueError(f"order {K} exceeds {MAX_ORDER}")
    m: list = []
    for n in range(1, K + 1):
        coef = _power_coeffs(m, n, n)
        m.append(sum(r[k - 1] * coef[k][n - k] for k in range(1, n + 1)))
    return m


def moments_to_cumulants(m: Sequence) -> list:
    """R_1..R_K from M_1..M_K; the triangular inverse of ``cumulants_to_moments``."""
    K = len(m)
    if K > MAX_ORDER:
        raise ValueError(f"order {K} exceeds {MAX_ORDER}")
    r: list = []
    for n in range(1, K + 1):
        coef = _power_coeffs(m, n, n)
        r.append(m[n - 1] - sum(r[k - 1] * coef[k][n - k] for k in range(1, n)))
    return r


@dataclass(frozen=True)
class CumulantSeq:
    """Free cumulants R_1..R_K."""

    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))

    @property
    def K(self) -> int:
        return len(self.r)

    def __getitem__(self, j: int):
        """R_j, one-based; zero beyond the truncation."""
        if j < 1:
            raise IndexError("cumulants are indexed from 1")
        return self.r[j - 1] if j <= len(self.r) else 0

    def moments(self) -> list:
        return cumulants_to_moments(self.r)

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.r])

    @classmethod
    def from_moments(cls, m: Sequence) -> "CumulantSeq":
        return cls(tuple(moments_to_cumulants(m)))


def semicircle(var, K: int = 8) -> CumulantSeq:
    return CumulantSeq((0, var) + (0,) * (K - 2))


def compress(c: CumulantSeq, ratio) -> CumulantSeq:
    """Free compression by a projection of trace ``ratio``: R_k -> ratio^{k-1} R_k."""
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    return CumulantSeq(tuple(x * ratio ** (k - 1) for k, x in enumerate(c.r, start=1)))


def convolve(c1: CumulantSeq, c2: CumulantSeq) -> CumulantSeq:
    """Free additive convolution: cumulants add."""
    K = max(c1.K, c2.K)
    return CumulantSeq(tuple(c1[j] + c2[j] for j in range(1, K + 1)))


@dataclass
class RSeries:
    """R-transform R(w) = sum_{k>=0} R_{k+1} w^k.

    ``func`` (and optionally ``deriv``) give the full analytic function when a
    closed form is known; otherwise the truncated polynomial is used.
    """

    cumulants: CumulantSeq
    func: Callable | None = field(default=None, repr=False)
    deriv: Callable | None = field(default=None, repr=False)

    def coefficients(self, convention: str = "shifted") -> np.ndarray:
        """Power-series coefficients.

        "shifted": [R_1, R_2, ...] as coefficients of w^0, w^1, ...;
        "voiculescu": [0, R_1, R_2, ...] for w R(w) = sum_k R_k w^k.
        """
        c = self.cumulants.as_float()
        if convention == "shifted":
            return c
        if convention == "voiculescu":
            return np.concatenate([[0.0], c])
        raise ValueError(f"unknown convention {convention!r}")

    def __call__(self, w):
        if self.func is not None:
            return self.func(w)
        return np.polynomial.polynomial.polyval(w, self.cumulants.as_float())

    def derivative(self, w):
        if self.func is not None:
            if self.deriv is not None:
                return self.deriv(w)
            h = 1e-6 * np.maximum(1.0, np.abs(w))
            return (self.func(w + h) - self.func(w - h)) / (2 * h)
        c = self.cumulants.as_float()
        return np.polynomial.polynomial.polyval(w, np.polynomial.polynomial.polyder(c))


# --- Levy measures ---------------------------------------------------------------

class DensityPart:
    """A density component of a Levy measure on a bounded interval."""

    lo: float
    hi: float

    def pdf(self, x):
        raise NotImplementedError

    def breakpoints(self) -> list[float]:
        return []

    def moment(self, j: int) -> float:
        pts = [p for p in self.breakpoints() if self.lo < p < self.hi]
        f = lambda x: x**j * self.pdf(x)
        val, _ = integrate.quad(f, self.lo, self.hi, points=pts or None,
                                epsabs=1e-14, epsrel=1e-12, limit=400)
        return val


@dataclass(frozen=True)
class Uniform(DensityPart):
    """height * 1_(lo, hi)(x) dx."""

    lo: float
    hi: float
    height: float

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x > self.lo) & (x < self.hi), self.height, 0.0)

    def moment(self, j: int) -> float:
        return self.height * (self.hi ** (j + 1) - self.lo ** (j + 1)) / (j + 1)


@dataclass(frozen=True)
class LogNormalFlow(DensityPart):
    """Image of an atom x0 of mass ``mass`` under the alpha = 1/2 Levy flow at time t.

    Density sqrt(2/(pi t)) (mass/|x0|) exp(-log(x/x0)^2 / (2t)) between 0 and x0.
    """

    x0: float
    mass: float
    t: float

    @property
    def lo(self):
        return min(0.0, self.x0)

    @property
    def hi(self):
        return max(0.0, self.x0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        ratio = x / self.x0
        inside = (ratio > 0) & (ratio < 1)
        safe = np.where(inside, ratio, 1.0)
        val = (math.sqrt(2 / (math.pi * self.t)) * self.mass / abs(self.x0)
               * np.exp(-np.log(safe) ** 2 / (2 * self.t)))
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class StableSmoothedUniform(DensityPart):
    """Image of height * 1_(a, b) (a, b of one sign) under the alpha = 1/2 flow.

    g(x) = height * P(a < x e^{sqrt(t)|Y|} < b) for standard normal Y.
    """

    a: float
    b: float
    height: float
    t: float

    @property
    def lo(self):
        return min(self.a, 0.0)

    @property
    def hi(self):
        return max(self.b, 0.0)

    def breakpoints(self):
        return [self.a, self.b]

    def pdf(self, x):
        from scipy.special import ndtr

        x = np.asarray(x, dtype=float)
        a, b = (self.a, self.b) if self.b > 0 else (-self.b, -self.a)
        y = x if self.b > 0 else -x
        out = np.zeros_like(y)
        pos = y > 0
        st = math.sqrt(self.t)
        ys = np.where(pos, y, 1.0)
        lo = np.maximum(np.log(np.maximum(a, 0.0) / ys) if a > 0 else -np.inf, 0.0)
        hi = np.log(b / ys)
        upper = np.maximum(hi, 0.0) / st
        lower = lo / st
        prob = 2 * np.clip(ndtr(upper) - ndtr(lower), 0.0, None)
        out[pos] = self.height * prob[pos]
        return out


@dataclass
class LevyMeasure:
    """Finite measure: atoms plus density components."""

    atoms: list = field(default_factory=list)  # (location, mass)
    densities: list = field(default_factory=list)  # DensityPart

    def __post_init__(self):
        merged: dict = {}
        for x, a in self.atoms:
            if a < 0:
                raise ValueError("atom masses must be nonnegative")
            merged[x] = merged.get(x, 0) + a
        self.atoms = sorted(merged.items())

    @property
    def total_mass(self):
        return self.moment(0)

    def moment(self, j: int):
        out = sum((a * x**j for x, a in self.atoms), 0)
        for d in self.densities:
            out = out + d.moment(j)
        return out

    def moments(self, jmax: int) -> list:
        return [self.moment(j) for j in range(jmax + 1)]

    def atom_at(self, x) -> float:
        return dict(self.atoms).get(x, 0)

    def support(self) -> tuple[float, float]:
        xs = [x for x, a in self.atoms if a]
        for d in self.densities:
            xs += [d.lo, d.hi]
        return (min(xs), max(xs)) if xs else (0.0, 0.0)

    def r_transform(self, w):
        """int w / (1 - x w) l(dx), evaluated numerically for densities."""
        w = np.asarray(w, dtype=complex)
        out = sum((a * w / (1 - x * w) for x, a in self.atoms), np.zeros_like(w))
        for d in self.densities:
            nodes, weights = np.polynomial.legendre.leggauss(200)
            pts = sorted(set([d.lo, d.hi] + [p for p in d.breakpoints() if d.lo < p < d.hi]))
            for lo, hi in zip(pts[:-1], pts[1:]):
                x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
                wt = 0.5 * (hi - lo) * weights * d.pdf(x)
                out = out + np.sum(wt[:, None] * w[None, ...].reshape(1, -1)
                                   / (1 - x[:, None] * w.reshape(1, -1)), axis=0).reshape(w.shape)
        return out


def levy_to_r(l: LevyMeasure, K: int, r1=0) -> CumulantSeq:
    """Cumulants R_1..R_K with R_{k+1} = M_{k-1}(l)."""
    return CumulantSeq((r1,) + tuple(l.moment(j) for j in range(K - 1)))


# --- Stieltjes transforms ----------------------------------------------------------

class StieltjesError(RuntimeError):
    pass


def _newton(R: RSeries, G, z, iters: int = 100, tol: float = 1e-13):
    for _ in range(iters):
        f = R(G) + 1 / G - z
        fp = R.derivative(G) - 1 / (G * G)
        step = f / fp
        # damp steps that would leave the lower half-plane or blow up
        bad = ~np.isfinite(step) | (np.abs(step) > 0.5 * np.abs(G))
        step = np.where(bad, 0.5 * np.abs(G) * step / np.maximum(np.abs(step), 1e-300), step)
        step = np.where(np.isfinite(step), step, 0)
        G = G - step
        if np.all(np.abs(step) <= tol * np.abs(G)):
            break
    return G


def stieltjes(R: RSeries | CumulantSeq, z, eps_min: float = 1e-3, n_path: int = 24,
              tol: float = 1e-12):
    """G(z) = int (z - x)^{-1} m(dx) for the measure with R-transform R.

    Solves z = R(G) + 1/G by Newton's method, following the root branch that
    behaves like 1/z at infinity along a vertical path down to z.
    """
    if isinstance(R, CumulantSeq):
        R = RSeries(R)
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.reshape(-1)
    if np.any(z.imag < eps_min):
        raise StieltjesError(f"Im z below {eps_min}")
    c = np.abs(R.cumulants.as_float())
    scale = 1.0 + sum(c[k] ** (1.0 / (k + 1)) for k in range(len(c)) if c[k] > 0)
    top = np.maximum(z.imag, 20 * scale)
    path = np.exp(np.linspace(np.log(top), np.log(z.imag), n_path).T)  # (npts, n_path)
    G = 1 / (z.real + 1j * top)
    for j in range(n_path):
        zz = z.real + 1j * path[:, j]
        G = _newton(R, G, zz)
    res = np.abs(R(G) + 1 / G - z)
    ok = np.isfinite(G) & (res < tol * np.maximum(1.0, np.abs(z))) & (G.imag <= 0)
    if not np.all(ok):
        bad = z[~ok][0]
        raise StieltjesError(f"Newton solve failed at z = {bad}")
    return G.reshape(shape) if shape else complex(G[0])


def stieltjes_from_cumulants(c: CumulantSeq | RSeries, z, eps_min: float = 1e-3):
    return stieltjes(c, z, eps_min=eps_min)


# --- duality between irreps and classes ---------------------------------------------

def group_dualize(table: FiniteGroupTable, direction: str, seqs):
    """Map per-irrep cumulants R^zeta_{k+1} to per-class gamma^theta_{k+1} or back.

    ``seqs[i][j]`` holds the order-(j+1) entry (so j = k) for irrep or class i.
    ``direction`` is "to_classes" or "to_irreps". Exact for exact tables.
    """
    exact = table.exact and all(isinstance(v, (int, Fraction, QComplex))
                                for row in seqs for v in row)
    vals = table.values if exact else table.complex_values()
    nz, nt = table.n_irreps, table.n_classes
    order = table.order
    K = len(seqs[0])
    zero = QComplex(0) if exact else 0j
    if direction == "to_classes":
        if len(seqs) != nz:
            raise ValueError("expected one sequence per irrep")
        out = []
        for th in range(nt):
            row = []
            for k in range(K):
                acc = zero
                for z in range(nz):
                    if exact:
                        acc = acc + vals[z][th] * (QComplex.coerce(seqs[z][k]) / Fraction(table.dims[z]) ** k)
                    else:
                        acc = acc + vals[z][th] * seqs[z][k] / float(table.dims[z]) ** k
                row.append(acc)
            out.append(row)
        return out
    if direction == "to_irreps":
        if len(seqs) != nt:
            raise ValueError("expected one sequence per class")
        out = []
        for z in range(nz):
            row = []
            for k in range(K):
                acc = zero
                for th in range(nt):
                    w = Fraction(table.class_sizes[th], order) * Fraction(table.dims[z]) ** k
                    if exact:
                        acc = acc + QComplex.coerce(seqs[th][k]) * vals[z][th].conjugate() * w
                    else:
                        acc = acc + seqs[th][k] * np.conj(vals[z][th]) * float(w)
                row.append(acc)
            out.append(row)
        return out
    raise ValueError(f"unknown direction {direction!r}")
