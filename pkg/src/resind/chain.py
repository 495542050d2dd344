"""The Res-Ind Markov chain on multi-diagrams of S_n(T).

``build`` produces the restriction matrix P_down, the induction matrix P_up
and their product P exactly (sparse dict-of-dict rationals). ``step`` draws
one transition without any matrix, from corner contents only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import ClassType, class_types, wreath_normalized_character
from .diagrams import (
    MultiDiagram,
    YoungDiagram,
    cells,
    covers,
    hook_dim,
    multi_diagrams,
    multi_dim,
)
from .groups import FiniteGroupTable, QComplex, plancherel_weights

__all__ = [
    "ChainMatrices",
    "BalanceReport",
    "SpectrumReport",
    "DEFAULT_CAP",
    "build",
    "explicit_entry",
    "plancherel_vector",
    "verify_detailed_balance",
    "verify_spectrum",
    "step",
    "removal_weights",
    "insertion_weights",
    "distribution_at",
    "FLOAT_THRESHOLD",
]

DEFAULT_CAP = 8
# step() switches from exact rational to float probabilities above this n
FLOAT_THRESHOLD = 64


class CapExceeded(ValueError):
    pass


@dataclass
class ChainMatrices:
    n: int
    table: FiniteGroupTable
    states: list
    p_down: dict  # lam index -> {nu index in lower: Fraction}
    p_up: dict  # nu index -> {mu index: Fraction}
    p: dict  # lam index -> {mu index: Fraction}
    lower_states: list
    stationary: list
    index: dict = field(repr=False, default_factory=dict)

    def entry(self, i: int, j: int) -> Fraction:
        return self.p.get(i, {}).get(j, Fraction(0))

    def dense(self) -> np.ndarray:
        """Float copy of P."""
        m = np.zeros((len(self.states), len(self.states)))
        for i, row in self.p.items():
            for j, v in row.items():
                m[i, j] = float(v)
        return m

    def row_sums(self, which: str = "p") -> list[Fraction]:
        mat = getattr(self, which)
        size = len(self.lower_states) if which == "p_up" else len(self.states)
        return [sum(mat.get(i, {}).values(), Fraction(0)) for i in range(size)]


def plancherel_vector(states, table: FiniteGroupTable) -> list[Fraction]:
    n = states[0].n if states else 0
    denom = math.factorial(n) * table.order**n
    return [Fraction(multi_dim(s, table) ** 2, denom) for s in states]


def build(n: int, table: FiniteGroupTable, cap: int = DEFAULT_CAP) -> ChainMatrices:
    """Exact transition matrices of the Res-Ind chain on Y_n(T^)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the cap {cap}; pass cap= to override")
    k = table.n_irreps
    states = multi_diagrams(n, k)
    lower = multi_diagrams(n - 1, k)
    index = {s: i for i, s in enumerate(states)}
    lower_index = {s: i for i, s in enumerate(lower)}
    dims = [multi_dim(s, table) for s in states]
    lower_dims = [multi_dim(s, table) for s in lower]
    order = table.order

    p_down: dict = {}
    for i, lam in enumerate(states):
        row = {}
        for nu, z in cells(lam):
            j = lower_index[nu]
            row[j] = Fraction(table.dims[z] * lower_dims[j], dims[i])
        p_down[i] = row
    p_up: dict = {}
    for j, nu in enumerate(lower):
        row = {}
        for mu, z in covers(nu):
            i = index[mu]
            row[i] = Fraction(table.dims[z] * dims[i], n * order * lower_dims[j])
        p_up[j] = row
    p: dict = {}
    for i, down in p_down.items():
        row: dict = {}
        for j, a in down.items():
            for l, b in p_up[j].items():
                row[l] = row.get(l, 0) + a * b
        p[i] = row
    return ChainMatrices(
        n=n,
        table=table,
        states=states,
        p_down=p_down,
        p_up=p_up,
        p=p,
        lower_states=lower,
        stationary=plancherel_vector(states, table),
        index=index,
    )


def _contains(big: tuple, small: tuple) -> bool:
    return len(small) <= len(big) and all(a <= b for a, b in zip(small, big))


def _one_box_apart(a: YoungDiagram, b: YoungDiagram) -> bool:
    """True when b is a with one box moved (same size, overlap |a| - 1)."""
    overlap = sum(min(x, y) for x, y in zip(a, b))
    return sum(a) == sum(b) and overlap == sum(a) - 1


def explicit_entry(lam, mu, table: FiniteGroupTable) -> Fraction:
    """Closed-form entry P_{lam, mu}.

    Diagonal entries count removable corners of each entry (local maxima of
    the profile), which is what the product P_down P_up gives.
    """
    n = sum(sum(e) for e in lam)
    if n != sum(sum(e) for e in mu):
        raise ValueError("lam and mu must have the same number of boxes")
    order = table.order
    sizes_l = [sum(e) for e in lam]
    sizes_m = [sum(e) for e in mu]
    diff = [sm - sl for sl, sm in zip(sizes_l, sizes_m)]

    if tuple(lam) == tuple(mu):
        total = sum(d * d * len(YoungDiagram(e).removable()) for d, e in zip(table.dims, lam))
        return Fraction(total, n * order)

    if all(d == 0 for d in diff):
        changed = [z for z in range(len(lam)) if tuple(lam[z]) != tuple(mu[z])]
        if len(changed) != 1 or not _one_box_apart(lam[changed[0]], mu[changed[0]]):
            return Fraction(0)
        z = changed[0]
        d = table.dims[z]
        return Fraction(hook_dim(tuple(mu[z])) * d * d, n * hook_dim(tuple(lam[z])) * order)

    if sorted(diff) == [-1] + [0] * (len(diff) - 2) + [1]:
        zeta = diff.index(-1)
        eta = diff.index(1)
        lz, mz = tuple(lam[zeta]), tuple(mu[zeta])
        le, me = tuple(lam[eta]), tuple(mu[eta])
        if not (_contains(lz, mz) and _contains(me, le)):
            return Fraction(0)
        if any(tuple(lam[z]) != tuple(mu[z]) for z in range(len(lam)) if z not in (zeta, eta)):
            return Fraction(0)
        de = table.dims[eta]
        return (
            Fraction(sizes_l[zeta], n * sizes_m[eta])
            * Fraction(hook_dim(mz) * hook_dim(me), hook_dim(lz) * hook_dim(le))
            * Fraction(de * de, order)
        )
    return Fraction(0)


@dataclass
class BalanceReport:
    n: int
    checked: int
    violations: list  # (lam, mu, lhs, rhs)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_detailed_balance(cm: ChainMatrices) -> BalanceReport:
    """Exact check of M_Pl(lam) P(lam, mu) = M_Pl(mu) P(mu, lam) over all pairs."""
    pi = cm.stationary
    violations = []
    checked = 0
    size = len(cm.states)
    for i in range(size):
        for j in range(i, size):
            a = pi[i] * cm.entry(i, j)
            b = pi[j] * cm.entry(j, i)
            checked += 1
            if a != b:
                violations.append((cm.states[i], cm.states[j], a, b))
    return BalanceReport(cm.n, checked, violations)


@dataclass
class SpectrumReport:
    n: int
    checks: list  # (ClassType, eigenvalue, ok)

    @property
    def ok(self) -> bool:
        return all(ok for _, _, ok in self.checks)

    @property
    def failures(self):
        return [(rho, ev) for rho, ev, ok in self.checks if not ok]


def verify_spectrum(cm: ChainMatrices, max_k: int | None = None) -> SpectrumReport:
    """Check P v = (1 - (k - m_1(rho_e)) / n) v for every class type with k <= n.

    v is the column of normalized characters at the embedded type rho.
    """
    n, table = cm.n, cm.table
    if not table.exact:
        raise ValueError("verify_spectrum needs an exact character table")
    max_k = n if max_k is None else max_k
    checks = []
    for k in range(0, max_k + 1):
        for rho in class_types(k, table.n_classes) if k else [ClassType.empty(table.n_classes)]:
            v = [wreath_normalized_character(lam, rho, n, table) for lam in cm.states]
            ev = Fraction(n - (k - rho.fixed_points()), n)
            ok = True
            for i in range(len(cm.states)):
                acc = QComplex(0)
                for j, pij in cm.p.get(i, {}).items():
                    acc = acc + v[j] * pij
                if acc != v[i] * ev:
                    ok = False
                    break
            checks.append((rho, ev, ok))
    return SpectrumReport(n, checks)


# --- sampling --------------------------------------------------------------------

def _corners(parts):
    """Ascending (content, row) lists of addable and removable corners."""
    L = len(parts)
    add = [(-L, L)]
    rem = []
    for i in range(L - 1, -1, -1):
        p = parts[i]
        below = parts[i + 1] if i + 1 < L else 0
        if p > below:
            rem.append((p - 1 - i, i))
        if i == 0 or parts[i - 1] > p:
            add.append((p - i, i))
    return add, rem


def removal_weights(parts, exact: bool = False):
    """Rows and weights dim(nu - box)/dim(nu) * |nu| of removable corners.

    Weights sum to |nu|.
    """
    add, rem = _corners(parts)
    rows, weights = [], []
    for c, row in rem:
        num = 1
        for xc, _ in add:
            num *= c - xc
        den = 1
        for yc, _ in rem:
            if yc != c:
                den *= c - yc
        rows.append(row)
        weights.append(Fraction(-num, den) if exact else -num / den)
    return rows, weights


def insertion_weights(parts, exact: bool = False):
    """Rows and transition-measure masses of addable corners (sum to 1)."""
    add, rem = _corners(parts)
    rows, weights = [], []
    for c, row in add:
        num = 1
        for yc, _ in rem:
            num *= c - yc
        den = 1
        for xc, _ in add:
            if xc != c:
                den *= c - xc
        rows.append(row)
        weights.append(Fraction(num, den) if exact else num / den)
    return rows, weights


def _choose(weights, u):
    acc = 0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    return len(weights) - 1


def step(lam: MultiDiagram, table: FiniteGroupTable, rng, exact: bool | None = None) -> MultiDiagram:
    """One Res-Ind transition: remove a box by P_down, then add one by P_up.

    Removal picks entry zeta with probability |lam^zeta| / n and a corner by
    the co-transition weights; insertion picks zeta with probability
    (dim zeta)^2 / |T| and a corner by the Kerov transition measure.
    """
    sizes = [sum(e) for e in lam]
    n = sum(sizes)
    if exact is None:
        exact = n <= FLOAT_THRESHOLD
    if n == 0:
        return lam
    # remove
    z = _choose(sizes, rng.random() * n)
    rows, w = removal_weights(lam[z], exact)
    r = rows[_choose(w, rng.random() * sizes[z])]
    parts = list(lam[z])
    parts[r] -= 1
    if parts[r] == 0:
        parts.pop()
    entries = list(lam)
    entries[z] = YoungDiagram._trusted(tuple(parts))
    # insert
    weights = plancherel_weights(table) if exact else _plancherel_cache(table)
    z2 = _choose(weights, rng.random())
    rows, w = insertion_weights(entries[z2], exact)
    r = rows[_choose(w, rng.random())]
    parts = list(entries[z2])
    if r == len(parts):
        parts.append(1)
    else:
        parts[r] += 1
    entries[z2] = YoungDiagram._trusted(tuple(parts))
    return tuple.__new__(MultiDiagram, entries)


_PL_CACHE: dict = {}


def _plancherel_cache(table: FiniteGroupTable):
    key = (table.name, table.dims)
    w = _PL_CACHE.get(key)
    if w is None:
        w = [float(x) for x in plancherel_weights(table)]
        _PL_CACHE[key] = w
    return w


def distribution_at(cm: ChainMatrices, m0, s: float, mean: float = 1.0, tol: float = 1e-14) -> np.ndarray:
    """Law of X_s for exponential pausing times: M_0 exp((s/mean)(P - I)).

    Summed as a Poisson mixture of powers of P; truncated once the
    remaining Poisson tail is below ``tol``.
    """
    P = cm.dense()
    lam = s / mean
    vec = np.asarray(m0, dtype=float)
    out = np.zeros_like(vec)
    weight = math.exp(-lam)
    j = 0
    while True:
        out += weight * vec
        j += 1
        ratio = lam / j
        # remaining tail is bounded by a geometric series once j > lam
        if ratio < 1 and weight * ratio / (1 - ratio) < tol:
            break
        vec = vec @ P
        weight *= ratio
        if j > 100_000:
            raise RuntimeError("Poisson series did not converge")
    return out
