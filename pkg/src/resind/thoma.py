"""Characters of S_infinity(T) from Thoma parameters and their scaling families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import ClassType
from .diagrams import AtomicMeasure
from .evolution import Preset, ensemble_preset
from .freeprob import CumulantSeq, LevyMeasure, levy_to_r
from .groups import FiniteGroupTable, QComplex

__all__ = [
    "GeometricTail",
    "ThomaParam",
    "ThomaFamily",
    "power_sum",
    "character_value",
    "thoma_measure",
    "rescaled_levy_limit",
    "rescaled_thoma_moments",
    "initial_cumulants_from_family",
    "scaled_cycle_value",
    "cycle_limit",
    "round_half_up",
    "family",
]


@dataclass(frozen=True)
class GeometricTail:
    """The infinite sequence scale (1 - q) q^{i-1}, i = 1, 2, ..."""

    scale: float
    q: float

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")

    def power_sum(self, j: int) -> float:
        return self.scale**j * (1 - self.q) ** j / (1 - self.q**j)

    def first(self) -> float:
        return self.scale * (1 - self.q)

    def terms(self, rel: float = 1e-18) -> np.ndarray:
        """Leading terms until q^i falls below ``rel``."""
        count = int(math.ceil(math.log(rel) / math.log(self.q))) + 1
        return self.scale * (1 - self.q) * self.q ** np.arange(count)


def _psum(seq, j):
    if isinstance(seq, GeometricTail):
        return seq.power_sum(j)
    return sum((x**j for x in seq), 0)


def _mass(seq):
    if isinstance(seq, GeometricTail):
        return seq.scale
    return sum(seq, 0)


@dataclass
class ThomaParam:
    """Per-irrep (alpha, beta, c); alpha and beta are finite lists or geometric tails."""

    alpha: list
    beta: list
    c: list

    def __post_init__(self):
        for z, (al, be, cz) in enumerate(zip(self.alpha, self.beta, self.c)):
            for seq in (al, be):
                if not isinstance(seq, GeometricTail):
                    if any(x < 0 for x in seq) or any(seq[i] < seq[i + 1] for i in range(len(seq) - 1)):
                        raise ValueError(f"parameters of irrep {z} must be nonnegative and decreasing")
            if _mass(al) + _mass(be) > cz + 1e-12:
                raise ValueError(f"sum of alpha and beta exceeds c for irrep {z}")
        total = sum(self.c, 0)
        if abs(float(total) - 1) > 1e-12:
            raise ValueError("c must sum to 1")

    def p(self, zeta: int, j: int):
        """p_j: c for j = 1, else sum alpha^j + (-1)^{j-1} sum beta^j."""
        if j == 1:
            return self.c[zeta]
        return _psum(self.alpha[zeta], j) + (-1) ** (j - 1) * _psum(self.beta[zeta], j)

    def first(self, zeta: int) -> float:
        vals = []
        for seq in (self.alpha[zeta], self.beta[zeta]):
            if isinstance(seq, GeometricTail):
                vals.append(seq.first())
            elif len(seq):
                vals.append(seq[0])
        return max(vals, default=0)


def power_sum(omega: ThomaParam, zeta: int, j: int):
    return omega.p(zeta, j)


def character_value(omega: ThomaParam, rho: ClassType, table: FiniteGroupTable):
    """f_omega at a class of type rho; fixed points at the identity class contribute 1.

    Exact (QComplex) when the table and parameters are exact, complex otherwise.
    """
    exact = table.exact
    out = QComplex(1) if exact else 1 + 0j
    for theta, j in rho.rows():
        if theta == 0 and j == 1:
            continue
        s = QComplex(0) if exact else 0j
        for z in range(table.n_irreps):
            pj = omega.p(z, j)
            if exact and isinstance(pj, (int, Fraction)):
                s = s + table.values[z][theta] * (Fraction(pj) / Fraction(table.dims[z]) ** j)
            else:
                exact = False
                s = complex(s) + complex(table.values[z][theta]) * float(pj) / table.dims[z] ** j
        out = out * s if exact else complex(out) * complex(s)
    return out


def thoma_measure(omega: ThomaParam, zeta: int, rel: float = 1e-18) -> AtomicMeasure:
    """Atoms alpha_i at alpha_i, beta_i at -beta_i, and the remainder of c at 0."""
    pairs = []
    al, be = omega.alpha[zeta], omega.beta[zeta]
    al_terms = al.terms(rel) if isinstance(al, GeometricTail) else al
    be_terms = be.terms(rel) if isinstance(be, GeometricTail) else be
    pairs += [(x, x) for x in al_terms if x]
    pairs += [(-x, x) for x in be_terms if x]
    pairs.append((0, omega.c[zeta] - _mass(al) - _mass(be)))
    return AtomicMeasure.from_pairs(pairs)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass
class ThomaFamily:
    """n -> omega^(n) for the P1, P2, P3 rules.

    P2: N = round(r sqrt(n)) equal atoms a/N (and b/N' with N' = round(r' sqrt(n)));
    P3: geometric tails with 1 - q = 1/(r sqrt(n)).
    """

    preset: Preset
    exact: bool = field(default=True)

    @property
    def name(self) -> str:
        return self.preset.name

    def at(self, n: int) -> ThomaParam:
        p = self.preset
        nz = p.table.n_irreps
        if p.name == "P1":
            c = [Fraction(p.table.dims[z] ** 2, p.table.order) for z in range(nz)]
            return ThomaParam([[] for _ in range(nz)], [[] for _ in range(nz)], c)
        if p.name == "P2":
            N = max(1, round_half_up(p.r * math.sqrt(n)))
            Np = max(1, round_half_up(p.rp * math.sqrt(n)))
            conv = (lambda v: Fraction(v).limit_denominator(10**12)) if self.exact else float
            a = [conv(x) for x in p.a]
            b = [conv(x) for x in p.b]
            c = [conv(x) for x in p.c]
            alpha = [[a[z] / N] * N if a[z] else [] for z in range(nz)]
            beta = [[b[z] / Np] * Np if b[z] else [] for z in range(nz)]
            return ThomaParam(alpha, beta, c)
        q = 1 - 1 / (p.r * math.sqrt(n))
        qp = 1 - 1 / (p.rp * math.sqrt(n))
        if not (0 < q < 1 and 0 < qp < 1):
            raise ValueError(f"n = {n} too small for 1 - q = 1/(r sqrt(n)) to lie in (0, 1)")
        alpha = [GeometricTail(float(p.a[z]), q) if p.a[z] else [] for z in range(nz)]
        beta = [GeometricTail(float(p.b[z]), qp) if p.b[z] else [] for z in range(nz)]
        return ThomaParam(alpha, beta, [float(x) for x in p.c])


def rescaled_levy_limit(family: ThomaFamily) -> list[LevyMeasure]:
    """Weak limit of the sqrt(n)-rescaled Thoma measures (closed form)."""
    return family.preset.levy0()


def rescaled_thoma_moments(family: ThomaFamily, n: int, zeta: int, jmax: int) -> list[float]:
    """M_0..M_jmax of the Thoma measure pushed forward by x -> sqrt(n) x.

    Uses M_{k-1} = p_k, so geometric tails are summed in closed form.
    """
    om = family.at(n)
    return [float(om.p(zeta, j + 1)) * n ** (j / 2) for j in range(jmax + 1)]


def initial_cumulants_from_family(family: ThomaFamily, K: int = 8) -> list[CumulantSeq]:
    """R_1 = 0 and R_{k+1} = M_{k-1} of the limiting Levy measure."""
    return [levy_to_r(l, K) for l in rescaled_levy_limit(family)]


def scaled_cycle_value(family: ThomaFamily, n: int, k: int, theta: int) -> complex:
    """n^{(k-1)/2} f_{omega^(n)} at a single (k, theta)-cycle."""
    table = family.preset.table
    rho = ClassType.cycle(k, theta, table.n_classes)
    val = complex(character_value(family.at(n), rho, table))
    return val * n ** ((k - 1) / 2)


def cycle_limit(family: ThomaFamily, k: int, theta: int) -> complex:
    """sum_zeta M_{k-1}(l_0^zeta) chi^zeta_theta / (dim zeta)^k."""
    table = family.preset.table
    levy = rescaled_levy_limit(family)
    vals = table.complex_values()
    return sum(levy[z].moment(k - 1) * vals[z][theta] / table.dims[z] ** k
               for z in range(table.n_irreps))


def family(name: str, table: FiniteGroupTable, **params) -> ThomaFamily:
    return ThomaFamily(ensemble_preset(name, table, **params))
