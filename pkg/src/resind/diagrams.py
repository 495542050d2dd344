"""Young diagrams, multi-diagrams and their Kerov transition measures.

Conventions: a cell (i, j) (row i, column j, 0-based) has content j - i.
Profiles are drawn in Russian convention, so a box has area 2 and the
profile of a diagram with interlacing minima x and maxima y is
``sum |t - x_i| - sum |t - y_j|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, prod

import numpy as np

from .groups import FiniteGroupTable

__all__ = [
    "YoungDiagram",
    "MultiDiagram",
    "InterlacingCoords",
    "AtomicMeasure",
    "partitions",
    "multi_diagrams",
    "hook_dim",
    "multi_dim",
    "covers",
    "cells",
    "interlacing",
    "corner_contents",
    "transition_measure",
    "profile",
    "rescaled_profile",
    "square_diagram",
    "parse_diagram",
    "parse_multi",
    "format_diagram",
    "format_multi",
]


class YoungDiagram(tuple):
    """A partition stored as a weakly decreasing tuple of positive parts."""

    __slots__ = ()

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts if p)
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts {parts} are not weakly decreasing")
        return super().__new__(cls, parts)

    @classmethod
    def _trusted(cls, parts: tuple) -> "YoungDiagram":
        return tuple.__new__(cls, parts)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def n(self) -> int:
        return sum(self)

    def conjugate(self) -> "YoungDiagram":
        if not self:
            return self
        return YoungDiagram._trusted(
            tuple(sum(1 for p in self if p > j) for j in range(self[0]))
        )

    def multiplicity(self, j: int) -> int:
        return sum(1 for p in self if p == j)

    def addable(self) -> list[int]:
        """Rows where a box can be added (row index = len(self) for a new row)."""
        rows = []
        for i in range(len(self) + 1):
            cur = self[i] if i < len(self) else 0
            if i == 0 or self[i - 1] > cur:
                rows.append(i)
        return rows

    def removable(self) -> list[int]:
        return [i for i in range(len(self)) if i == len(self) - 1 or self[i] > self[i + 1]]

    def add_box(self, row: int) -> "YoungDiagram":
        parts = list(self)
        if row == len(parts):
            parts.append(1)
        else:
            parts[row] += 1
        return YoungDiagram._trusted(tuple(parts))

    def remove_box(self, row: int) -> "YoungDiagram":
        parts = list(self)
        parts[row] -= 1
        if parts[row] == 0:
            parts.pop()
        return YoungDiagram._trusted(tuple(parts))

    def __repr__(self):
        return f"YoungDiagram({tuple(self)})"


class MultiDiagram(tuple):
    """Tuple of Young diagrams indexed by the irreps of T (table order)."""

    __slots__ = ()

    def __new__(cls, entries=()):
        return super().__new__(cls, (e if isinstance(e, YoungDiagram) else YoungDiagram(e)
                                     for e in entries))

    @property
    def n(self) -> int:
        return sum(sum(e) for e in self)

    def sizes(self) -> tuple[int, ...]:
        return tuple(sum(e) for e in self)

    def replace(self, zeta: int, diagram: YoungDiagram) -> "MultiDiagram":
        entries = list(self)
        entries[zeta] = diagram
        return tuple.__new__(MultiDiagram, entries)

    def __repr__(self):
        return "MultiDiagram(" + ", ".join(str(tuple(e)) for e in self) + ")"


@dataclass(frozen=True)
class InterlacingCoords:
    """Minima x_1 < y_1 < x_2 < ... < y_{r-1} < x_r of a profile."""

    x: tuple
    y: tuple

    def __post_init__(self):
        if len(self.x) != len(self.y) + 1:
            raise ValueError("need exactly one more minimum than maxima")
        seq = []
        for i, xi in enumerate(self.x):
            seq.append(xi)
            if i < len(self.y):
                seq.append(self.y[i])
        if any(seq[i] >= seq[i + 1] for i in range(len(seq) - 1)):
            raise ValueError(f"coordinates do not interlace: x={self.x}, y={self.y}")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported measure on the real line."""

    atoms: tuple  # ((location, mass), ...)

    @classmethod
    def from_pairs(cls, pairs) -> "AtomicMeasure":
        merged: dict = {}
        for loc, mass in pairs:
            merged[loc] = merged.get(loc, 0) + mass
        return cls(tuple(sorted(merged.items())))

    @property
    def locations(self):
        return [a for a, _ in self.atoms]

    @property
    def masses(self):
        return [m for _, m in self.atoms]

    def total_mass(self):
        return sum(self.masses)

    def moment(self, k: int):
        return sum(m * a**k for a, m in self.atoms)

    def moments(self, kmax: int) -> list:
        """[M_1, ..., M_kmax]."""
        return [self.moment(k) for k in range(1, kmax + 1)]

    def scaled(self, factor) -> "AtomicMeasure":
        """Pushforward under x -> factor * x."""
        return AtomicMeasure(tuple((a * factor, m) for a, m in self.atoms))

    def stieltjes(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a, m in self.atoms:
            out = out + float(m) / (z - float(a))
        return out

    def __getitem__(self, loc):
        for a, m in self.atoms:
            if a == loc:
                return m
        return 0


# --- enumeration ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _partitions(n: int, maxpart: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions(n: int) -> list[YoungDiagram]:
    """All partitions of n in reverse lexicographic order, (n) first."""
    return [YoungDiagram._trusted(p) for p in _partitions(n, n)]


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def multi_diagrams(n: int, k: int) -> list[MultiDiagram]:
    """All k-tuples of partitions with total size n.

    Order: entry sizes in reverse lexicographic order, then partitions in
    reverse lexicographic order entry by entry.
    """
    out = []
    for sizes in _compositions(n, k):
        for combo in product(*(partitions(s) for s in sizes)):
            out.append(tuple.__new__(MultiDiagram, combo))
    return out


# --- dimensions -----------------------------------------------------------------

@lru_cache(maxsize=65536)
def hook_dim(nu: tuple) -> int:
    """Number of standard Young tableaux of shape nu (hook-length formula)."""
    nu = tuple(nu)
    n = sum(nu)
    if n == 0:
        return 1
    conj = [sum(1 for p in nu if p > j) for j in range(nu[0])]
    hooks = 1
    for i, row in enumerate(nu):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return factorial(n) // hooks


def multi_dim(lam, table: FiniteGroupTable) -> int:
    """Dimension of the irrep of the wreath product labelled by lam."""
    sizes = [sum(e) for e in lam]
    n = sum(sizes)
    out = factorial(n)
    for s in sizes:
        out //= factorial(s)
    for s, d, e in zip(sizes, table.dims, lam):
        out *= d**s * hook_dim(tuple(e))
    return out


def covers(nu: MultiDiagram) -> list[tuple[MultiDiagram, int]]:
    """All mu with nu -> mu by adding one box, with the entry index."""
    out = []
    for z, entry in enumerate(nu):
        for row in entry.addable():
            out.append((nu.replace(z, entry.add_box(row)), z))
    return out


def cells(lam: MultiDiagram) -> list[tuple[MultiDiagram, int]]:
    """All nu with nu -> lam (one box removed), with the entry index."""
    out = []
    for z, entry in enumerate(lam):
        for row in entry.removable():
            out.append((lam.replace(z, entry.remove_box(row)), z))
    return out


# --- interlacing and transition measures ----------------------------------------

def interlacing(nu) -> InterlacingCoords:
    """Contents of addable corners (x) and removable corners (y), ascending."""
    nu = YoungDiagram(nu) if not isinstance(nu, YoungDiagram) else nu
    xs = sorted((nu[i] if i < len(nu) else 0) - i for i in nu.addable())
    ys = sorted(nu[i] - 1 - i for i in nu.removable())
    return InterlacingCoords(tuple(xs), tuple(ys))


def corner_contents(parts) -> tuple[list[int], list[int]]:
    """Ascending addable (x) and removable (y) contents without validation."""
    L = len(parts)
    xs = [-L]
    ys = []
    for i in range(L - 1, -1, -1):
        p = parts[i]
        below = parts[i + 1] if i + 1 < L else 0
        if p > below:
            ys.append(p - 1 - i)
        if i == 0 or parts[i - 1] > p:
            xs.append(p - i)
    return xs, ys


def transition_measure(nu, exact: bool = True) -> AtomicMeasure:
    """Kerov transition measure of a Young diagram.

    Atoms sit at the addable-corner contents with masses
    ``prod_j (x_i - y_j) / prod_{k != i} (x_i - x_k)``; these equal
    ``dim(nu + box) / ((|nu| + 1) dim nu)``.
    """
    c = interlacing(nu)
    xs, ys = c.x, c.y
    atoms = []
    for i, xi in enumerate(xs):
        num = prod((xi - yj) for yj in ys) if ys else 1
        den = prod((xi - xk) for k, xk in enumerate(xs) if k != i) if len(xs) > 1 else 1
        mass = Fraction(num, den) if exact else num / den
        atoms.append((xi, mass))
    return AtomicMeasure(tuple(atoms))


def profile(coords: InterlacingCoords, grid) -> np.ndarray:
    """Profile of the rectangular diagram with the given interlacing coordinates."""
    t = np.asarray(grid, dtype=float)
    out = np.zeros_like(t)
    for xi in coords.x:
        out += np.abs(t - float(xi))
    for yj in coords.y:
        out -= np.abs(t - float(yj))
    return out


def rescaled_profile(nu, n: int, grid) -> np.ndarray:
    """Profile of nu shrunk by 1/sqrt(n) in both directions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = np.sqrt(n)
    t = np.asarray(grid, dtype=float)
    return profile(interlacing(nu), s * t) / s


def square_diagram(n: int) -> YoungDiagram:
    """Diagram with n boxes closest to a square.

    A q x q square with q = isqrt(n); leftover boxes fill an extra column on
    the right from the top, then a new bottom row.
    """
    q = int(np.floor(np.sqrt(n)))
    while (q + 1) * (q + 1) <= n:
        q += 1
    while q * q > n:
        q -= 1
    r = n - q * q
    parts = [q] * q
    if r <= q:
        for i in range(r):
            parts[i] += 1
    else:
        parts = [q + 1] * q + [r - q]
    return YoungDiagram(parts)


# --- literal syntax ---------------------------------------------------------------

def parse_diagram(text: str) -> YoungDiagram:
    """Parse ``"3,2,1"``; empty string or ``"-"`` is the empty diagram."""
    text = text.strip()
    if text in ("", "-", "()", "0"):
        return YoungDiagram(())
    return YoungDiagram(sorted((int(p) for p in text.split(",") if p.strip()), reverse=True))


def parse_multi(text: str, table: FiniteGroupTable) -> MultiDiagram:
    """Parse ``"zeta1:3,2;zeta2:1"``; unnamed irreps get the empty diagram."""
    entries = [YoungDiagram(())] * table.n_irreps
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        label, sep, body = chunk.partition(":")
        if not sep:
            raise ValueError(f"multi-diagram entry {chunk!r} lacks 'label:' prefix")
        entries[table.irrep_index(label.strip())] = parse_diagram(body)
    return MultiDiagram(entries)


def format_diagram(nu) -> str:
    return ",".join(str(p) for p in nu) if len(nu) else "-"


def format_multi(lam, table: FiniteGroupTable) -> str:
    return ";".join(f"{lab}:{format_diagram(e)}" for lab, e in zip(table.irrep_labels, lam))
