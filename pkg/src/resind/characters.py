"""Exact characters of symmetric groups and of wreath products S_n(T)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

from .diagrams import YoungDiagram, hook_dim, multi_diagrams
from .groups import FiniteGroupTable, QComplex

__all__ = [
    "ClassType",
    "mn_character",
    "falling",
    "sigma",
    "wreath_normalized_character",
    "cycle_character",
    "class_types",
    "character_table",
    "MAX_ROWS",
]

MAX_ROWS = 8


def falling(n: int, k: int) -> int:
    """Falling factorial n (n-1) ... (n-k+1)."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


@dataclass(frozen=True)
class ClassType:
    """Conjugacy-class type of S_k(T): one partition per class of T.

    Embedded into S_n(T) by padding the identity-class entry with 1-cycles.
    """

    entries: tuple  # tuple[YoungDiagram, ...] in table class order

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(e if isinstance(e, YoungDiagram) else YoungDiagram(e)
                                   for e in self.entries)
        )

    @classmethod
    def cycle(cls, k: int, theta: int, n_classes: int) -> "ClassType":
        """The type (k)_theta: a single k-cycle in class theta."""
        entries = [YoungDiagram(())] * n_classes
        entries[theta] = YoungDiagram((k,))
        return cls(tuple(entries))

    @classmethod
    def empty(cls, n_classes: int) -> "ClassType":
        return cls(tuple(YoungDiagram(()) for _ in range(n_classes)))

    @property
    def k(self) -> int:
        return sum(sum(e) for e in self.entries)

    def length(self) -> int:
        return sum(len(e) for e in self.entries)

    def rows(self) -> list[tuple[int, int]]:
        """Every row as (class index, length); equal rows stay distinct."""
        return [(theta, part) for theta, e in enumerate(self.entries) for part in e]

    def fixed_points(self) -> int:
        """m_1 of the identity-class entry."""
        return self.entries[0].multiplicity(1)

    def union(self, other: "ClassType") -> "ClassType":
        return ClassType(tuple(
            YoungDiagram(sorted(tuple(a) + tuple(b), reverse=True))
            for a, b in zip(self.entries, other.entries)
        ))


# --- symmetric groups -----------------------------------------------------------

@lru_cache(maxsize=None)
def _mn(nu: tuple, rho: tuple) -> int:
    # border-strip recursion on beta-numbers; rho consumed from its largest part
    if not rho:
        return 1 if sum(nu) == 0 else 0
    k = rho[0]
    rest = rho[1:]
    L = len(nu)
    beta = [nu[i] + (L - 1 - i) for i in range(L)]
    occupied = set(beta)
    total = 0
    for b in beta:
        c = b - k
        if c < 0 or c in occupied:
            continue
        height = sum(1 for x in beta if c < x < b)
        new_beta = sorted([x for x in beta if x != b] + [c], reverse=True)
        new_nu = tuple(x - (L - 1 - i) for i, x in enumerate(new_beta))
        new_nu = tuple(p for p in new_nu if p > 0)
        total += (-1) ** height * _mn(new_nu, rest)
    return total


def mn_character(nu, rho) -> int:
    """chi^nu evaluated at cycle type rho (Murnaghan-Nakayama rule)."""
    nu = tuple(nu)
    rho = tuple(sorted((int(p) for p in rho if p), reverse=True))
    if sum(nu) != sum(rho):
        raise ValueError(f"size mismatch: |nu| = {sum(nu)}, |rho| = {sum(rho)}")
    return _mn(nu, rho)


def sigma(tau, nu) -> Fraction:
    """Normalized central character |nu|^{(|tau|)} chi^nu_{tau,1...} / dim nu."""
    tau = tuple(sorted((int(p) for p in tau if p), reverse=True))
    nu = tuple(nu)
    n, k = sum(nu), sum(tau)
    if n < k:
        return Fraction(0)
    chi = mn_character(nu, tau + (1,) * (n - k))
    return Fraction(falling(n, k) * chi, hook_dim(nu))


# --- wreath products --------------------------------------------------------------

def wreath_normalized_character(lam, rho: ClassType, n: int, table: FiniteGroupTable) -> QComplex:
    """chi^lam / dim lam at the type rho embedded into S_n(T).

    Sums over all labelings of the rows of rho by irreps of T; labelings
    that overfill an entry vanish through ``sigma``.
    """
    k = rho.k
    if sum(sum(e) for e in lam) != n:
        raise ValueError("lam does not have n boxes")
    if k > n:
        raise ValueError(f"class type of size {k} does not embed in S_{n}(T)")
    rows = rho.rows()
    if len(rows) > MAX_ROWS:
        raise ValueError(f"class type has {len(rows)} rows; at most {MAX_ROWS} supported")
    n_irr = table.n_irreps
    total = QComplex(0)
    for labels in product(range(n_irr), repeat=len(rows)):
        term = QComplex(1)
        for z in range(n_irr):
            assigned = [rows[i] for i in range(len(rows)) if labels[i] == z]
            if not assigned:
                continue
            tau = tuple(sorted((length for _, length in assigned), reverse=True))
            s = sigma(tau, lam[z])
            if s == 0:
                term = QComplex(0)
                break
            factor = QComplex(s / Fraction(table.dims[z]) ** sum(tau))
            for theta, _ in assigned:
                factor = factor * table.values[z][theta]
            term = term * factor
        total = total + term
    return total / falling(n, k)


def cycle_character(lam, k: int, theta: int, table: FiniteGroupTable, n: int | None = None) -> QComplex:
    """chi^lam / dim lam at a single (k, theta)-cycle embedded into S_n(T)."""
    if n is None:
        n = sum(sum(e) for e in lam)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = QComplex(0)
    for z in range(table.n_irreps):
        s = sigma((k,), lam[z])
        if s:
            total = total + table.values[z][theta] * (s / Fraction(table.dims[z]) ** k)
    return total / falling(n, k)


def class_types(k: int, n_classes: int) -> list[ClassType]:
    """All class types of total size k (the set Y_k([T]))."""
    return [ClassType(tuple(m)) for m in multi_diagrams(k, n_classes)]


def centralizer_order(rho: ClassType, table: FiniteGroupTable) -> int:
    """Order of the centralizer of an element of type rho in S_k(T)."""
    out = 1
    for theta, e in enumerate(rho.entries):
        cent_t = table.order // table.class_sizes[theta]
        for j in set(e):
            m = e.multiplicity(j)
            out *= (j * cent_t) ** m * factorial(m)
    return out


def _class_size(rho: ClassType, table: FiniteGroupTable) -> Fraction:
    k = rho.k
    return Fraction(factorial(k) * table.order**k, centralizer_order(rho, table))


def character_table(n: int, table: FiniteGroupTable):
    """Normalized character table of S_n(T).

    Returns (states, types, rows) with ``rows[i][j]`` the value of
    ``chi^{states[i]} / dim`` at ``types[j]``.
    """
    states = multi_diagrams(n, table.n_irreps)
    types = class_types(n, table.n_classes)
    rows = [[wreath_normalized_character(lam, rho, n, table) for rho in types] for lam in states]
    return states, types, rows


def symmetric_class_size(rho) -> int:
    n = sum(rho)
    z = 1
    for j in set(rho):
        m = sum(1 for p in rho if p == j)
        z *= j**m * factorial(m)
    return factorial(n) // z
