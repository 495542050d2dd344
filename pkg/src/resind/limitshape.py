"""Continuous diagrams from transition measures (inverse Markov transform).

For a measure with Stieltjes transform G, the diagram's sigma = (omega - |x|)/2
has derivative (arg z + arg G(z)) / pi in the limit z -> x from above. Both
arguments lie in (-pi, pi) there, so no branch tracking is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .diagrams import AtomicMeasure, InterlacingCoords, profile
from .evolution import EvolutionSpec, evolve_cumulants, r_transform_exponential, r_transform_stable
from .freeprob import CumulantSeq, RSeries, stieltjes

__all__ = [
    "ContinuousDiagram",
    "DensityResult",
    "NotAProbability",
    "vkls",
    "density_from_cumulants",
    "diagram_from_measure",
    "rectangular_inverse",
    "shapes_at_time",
    "support_estimate",
    "EPS_SCHEDULE",
    "ATOM_THRESHOLD",
]

EPS_SCHEDULE = (0.05, 0.025, 0.0125)
# eps |Im G| above this at the finest eps marks a point as atomic
ATOM_THRESHOLD = 0.1


class NotAProbability(ValueError):
    pass


def vkls(x, scale: float = 1.0) -> np.ndarray:
    """Limit shape of the semicircle of variance scale^2."""
    x = np.asarray(x, dtype=float) / scale
    inside = np.abs(x) < 2
    xc = np.clip(x, -2, 2)
    val = (2 / math.pi) * (xc * np.arcsin(xc / 2) + np.sqrt(4 - xc * xc))
    return scale * np.where(inside, val, np.abs(x))


@dataclass
class ContinuousDiagram:
    x: np.ndarray
    omega: np.ndarray
    support: tuple
    atoms: tuple = ()  # locations where G looked atomic during inversion

    def area(self) -> float:
        """int (omega - |x|) dx; twice the variance of the transition measure."""
        return float(trapezoid(self.omega - np.abs(self.x), self.x))

    def lipschitz_ok(self, tol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(np.diff(self.omega)) <= np.diff(self.x) * (1 + tol) + tol))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self.x, self.omega)
        return np.where((t < self.x[0]) | (t > self.x[-1]), np.abs(t), inside)


@dataclass
class DensityResult:
    x: np.ndarray
    density: np.ndarray
    mass: float
    flagged: bool
    message: str = ""


def _richardson(values: list[np.ndarray]) -> np.ndarray:
    """Eliminate the O(eps) and O(eps^2) terms for eps halving each step."""
    level = list(values)
    factor = 2.0
    while len(level) > 1:
        level = [(factor * b - a) / (factor - 1) for a, b in zip(level[:-1], level[1:])]
        factor *= 2.0
    return level[0]


def _as_r(c) -> RSeries:
    return c if isinstance(c, RSeries) else RSeries(c)


def support_estimate(R: RSeries | CumulantSeq, eps: float = 0.02, thresh: float = 1e-3) -> tuple:
    """Interval where the density exceeds ``thresh`` on a coarse scan, widened by 10%."""
    R = _as_r(R)
    c = np.abs(R.cumulants.as_float())
    L = 2.0 + 4 * sum(c[k] ** (1.0 / (k + 1)) for k in range(1, len(c)) if c[k] > 0)
    xs = np.linspace(-L, L, 801)
    dens = -stieltjes(R, xs + 1j * eps).imag / math.pi
    idx = np.nonzero(dens > thresh)[0]
    if idx.size == 0:
        return (-1.0, 1.0)
    lo, hi = xs[idx[0]], xs[idx[-1]]
    pad = 0.1 * (hi - lo) + 2 * eps
    return (lo - pad, hi + pad)


def density_from_cumulants(c, grid=None, eps_schedule=EPS_SCHEDULE, strict: bool = False) -> DensityResult:
    """Density -Im G(x + i eps)/pi, extrapolated to eps = 0 over ``eps_schedule``."""
    R = _as_r(c)
    auto = grid is None
    if auto:
        lo, hi = support_estimate(R)
        grid = np.linspace(lo, hi, 400)
    x = np.asarray(grid, dtype=float)
    vals = [-stieltjes(R, x + 1j * e, eps_min=min(eps_schedule) / 2).imag / math.pi
            for e in eps_schedule]
    # at eps > 0 the values are Poisson-smoothed densities, nonnegative for a
    # genuine law; negativity after extrapolation alone is overshoot
    raw_min = min(float(np.min(v)) for v in vals)
    dens = np.maximum(_richardson(vals), 0.0) if raw_min >= 0 else _richardson(vals)
    mass = float(trapezoid(dens, x))
    flagged = raw_min < -1e-3 or bool(np.min(dens) < -1e-3)
    if auto:
        # the automatic grid covers the support, so a genuine law has unit mass
        flagged |= abs(mass - 1) > 1e-2
    msg = "cumulant data not a probability at this truncation" if flagged else ""
    if flagged and strict:
        raise NotAProbability(msg)
    return DensityResult(x, dens, mass, flagged, msg)


def rectangular_inverse(m: AtomicMeasure) -> InterlacingCoords:
    """Interlacing coordinates of the rectangular diagram with transition measure m.

    Minima are the atoms; maxima are the zeros of sum_i m_i prod_{k != i} (z - x_k).
    """
    xs = [float(a) for a in m.locations]
    ms = [float(w) for w in m.masses]
    if len(xs) == 1:
        return InterlacingCoords((xs[0],), ())
    poly = np.zeros(1)
    P = np.polynomial.polynomial
    for i, mi in enumerate(ms):
        term = np.array([mi])
        for k, xk in enumerate(xs):
            if k != i:
                term = P.polymul(term, [-xk, 1.0])
        poly = P.polyadd(poly, term)
    ys = np.sort(P.polyroots(poly).real)
    return InterlacingCoords(tuple(xs), tuple(float(y) for y in ys))


def diagram_from_measure(G: Callable | AtomicMeasure, grid, eps_schedule=EPS_SCHEDULE,
                         support: tuple | None = None, fine: int = 4001) -> ContinuousDiagram:
    """Continuous diagram whose transition measure has Stieltjes transform G.

    ``G`` is a vectorized callable on the upper half-plane. An AtomicMeasure,
    or its bound ``stieltjes``, is inverted exactly through its interlacing
    coordinates; for other callables atom-like peaks are reported in ``atoms``.
    """
    grid = np.asarray(grid, dtype=float)
    owner = getattr(G, "__self__", None)
    if isinstance(owner, AtomicMeasure):
        G = owner
    if isinstance(G, AtomicMeasure):
        coords = rectangular_inverse(G)
        return ContinuousDiagram(grid, profile(coords, grid), (coords.x[0], coords.x[-1]),
                                 tuple(float(a) for a in G.locations))
    lo = min(grid[0], support[0]) if support else grid[0]
    hi = max(grid[-1], support[1]) if support else grid[-1]
    xf = np.linspace(lo, hi, fine)
    vals = []
    for e in eps_schedule:
        z = xf + 1j * e
        g = np.asarray(G(z), dtype=complex)
        if np.any(g.imag > 0):
            bad = xf[np.argmax(g.imag > 0)]
            raise ValueError(f"G has positive imaginary part at x = {bad}")
        vals.append((np.angle(z) + np.angle(g)) / math.pi)
    # an atom of mass w gives eps |Im G| ~ w near it; a density f gives ~ pi eps f
    hit = e * np.abs(g.imag) > ATOM_THRESHOLD
    atoms = tuple(float(a) for a in xf[1:-1][hit[1:-1] & (np.abs(g.imag[1:-1]) >= np.abs(g.imag[:-2]))
                                             & (np.abs(g.imag[1:-1]) >= np.abs(g.imag[2:]))])
    # sigma' lies in [-1, 0] right of the origin and in [0, 1] left of it
    dsig = _richardson(vals)
    dsig = np.where(xf > 0, np.clip(dsig, -1.0, 0.0), np.clip(dsig, 0.0, 1.0))
    # sigma vanishes to the right of the support
    sig = cumulative_trapezoid(dsig, xf, initial=0.0)
    sig = sig - sig[-1]
    omega_f = np.abs(xf) + 2 * sig
    omega = np.interp(grid, xf, omega_f)
    return ContinuousDiagram(grid, omega, (lo, hi), atoms)


def shapes_at_time(spec: EvolutionSpec, t: float, grid=None, closed: bool = True) -> list[ContinuousDiagram]:
    """Averaged limit shape of every entry at time t.

    With ``closed`` and closed-form initial R-transforms on ``spec``, the full
    analytic R(t, w) is used; otherwise the truncated cumulant series.
    """
    if closed and spec.r0 is not None:
        rs = (r_transform_exponential(spec, t) if spec.clock == "exponential"
              else r_transform_stable(spec, t))
    else:
        rs = [RSeries(c) for c in evolve_cumulants(spec, t)]
    out = []
    for R in rs:
        sup = support_estimate(R)
        g = np.linspace(sup[0], sup[1], 400) if grid is None else np.asarray(grid, dtype=float)
        G = lambda z, R=R: stieltjes(R, z, eps_min=1e-3)
        out.append(diagram_from_measure(G, g, support=sup))
    return out
