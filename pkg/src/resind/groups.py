"""Character tables of small finite groups.

Character values are stored as exact complex rationals (:class:`QComplex`).
Groups whose characters are not Gaussian rationals (cyclic groups of order
other than 1, 2, 4) carry rational approximations and ``exact = False``;
their orthogonality is checked to a tolerance instead.
"""
from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from pathlib import Path

__all__ = [
    "QComplex",
    "FiniteGroupTable",
    "TableError",
    "builtin",
    "builtin_names",
    "load_table",
    "dump_table",
    "plancherel_weights",
    "validate",
]

_INEXACT_TOL = 1e-9


class TableError(ValueError):
    """Raised when a character table is malformed or fails orthogonality."""


@dataclass(frozen=True)
class QComplex:
    """Complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "QComplex":
        if isinstance(value, QComplex):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"cannot coerce {value!r} to QComplex")

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def __add__(self, other):
        try:
            o = QComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = QComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QComplex.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QComplex.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("QComplex division by zero")
        num = self * o.conjugate()
        return QComplex(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return QComplex.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = QComplex(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = QComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        if self.im == 0:
            return f"QComplex({self.re})"
        return f"QComplex({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


@dataclass(frozen=True)
class FiniteGroupTable:
    """Character table of a finite group T.

    ``values[i][j]`` is the character of irrep ``irrep_labels[i]`` on class
    ``class_labels[j]``. The identity class is always column 0.
    """

    name: str
    class_labels: tuple[str, ...]
    class_sizes: tuple[int, ...]
    irrep_labels: tuple[str, ...]
    dims: tuple[int, ...]
    values: tuple[tuple[QComplex, ...], ...]
    exact: bool = True

    @property
    def order(self) -> int:
        return sum(self.class_sizes)

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def n_irreps(self) -> int:
        return len(self.irrep_labels)

    def value(self, irrep: int, cls: int) -> QComplex:
        return self.values[irrep][cls]

    def complex_values(self):
        """Character values as a nested list of Python complex numbers."""
        return [[complex(v) for v in row] for row in self.values]

    def irrep_index(self, label: str) -> int:
        try:
            return self.irrep_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown irrep label {label!r} for group {self.name}") from None

    def class_index(self, label: str) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown class label {label!r} for group {self.name}") from None


def _orthogonality_failures(table: FiniteGroupTable) -> list[str]:
    """Return human-readable descriptions of every violated identity."""
    fails = []
    order = table.order
    if len(table.class_labels) != len(table.irrep_labels):
        fails.append(
            f"number of classes ({len(table.class_labels)}) != number of irreps "
            f"({len(table.irrep_labels)})"
        )
        return fails
    if len(table.class_sizes) != table.n_classes or len(table.dims) != table.n_irreps:
        fails.append("label/size/dim lengths disagree")
        return fails
    if len(table.values) != table.n_irreps or any(len(r) != table.n_classes for r in table.values):
        fails.append("values matrix has the wrong shape")
        return fails
    if table.class_sizes[0] != 1:
        fails.append("identity class must be listed first and have size 1")
    if any(s <= 0 for s in table.class_sizes):
        fails.append("class sizes must be positive")
    if any(d <= 0 for d in table.dims):
        fails.append("irrep dimensions must be positive")

    sq = sum(d * d for d in table.dims)
    if sq != order:
        fails.append(f"sum of squared dimensions {sq} != |T| = {order}")

    for i, d in enumerate(table.dims):
        if table.values[i][0] != d:
            fails.append(f"chi^{table.irrep_labels[i]} at identity != dim {d}")

    if table.exact:
        def close(a: QComplex, b) -> bool:
            return a == b
    else:
        def close(a: QComplex, b) -> bool:
            return abs(complex(a) - complex(QComplex.coerce(b))) < _INEXACT_TOL * max(1, order)

    for i in range(table.n_irreps):
        for j in range(i, table.n_irreps):
            acc = QComplex(0)
            for c, size in enumerate(table.class_sizes):
                acc = acc + size * table.values[i][c] * table.values[j][c].conjugate()
            want = order if i == j else 0
            if not close(acc, want):
                fails.append(
                    f"row orthogonality <{table.irrep_labels[i]},{table.irrep_labels[j]}> "
                    f"= {acc} != {want}"
                )
    for a in range(table.n_classes):
        for b in range(a, table.n_classes):
            acc = QComplex(0)
            for i in range(table.n_irreps):
                acc = acc + table.values[i][a] * table.values[i][b].conjugate()
            want = Fraction(order, table.class_sizes[a]) if a == b else 0
            if not close(acc, want):
                fails.append(
                    f"column orthogonality ({table.class_labels[a]},{table.class_labels[b]}) "
                    f"= {acc} != {want}"
                )
    return fails


def validate(table: FiniteGroupTable) -> None:
    """Raise :class:`TableError` naming the first failed identity."""
    fails = _orthogonality_failures(table)
    if fails:
        raise TableError(f"group table {table.name!r} invalid: " + "; ".join(fails))


def plancherel_weights(table: FiniteGroupTable) -> tuple[Fraction, ...]:
    """Plancherel measure of T, (dim zeta)^2 / |T| per irrep."""
    order = table.order
    return tuple(Fraction(d * d, order) for d in table.dims)


# --- builtins -----------------------------------------------------------------

def _make(name, classes, sizes, irreps, rows, exact=True) -> FiniteGroupTable:
    values = tuple(tuple(QComplex.coerce(v) for v in row) for row in rows)
    dims = tuple(int(row[0].re) for row in values)
    table = FiniteGroupTable(
        name=name,
        class_labels=tuple(classes),
        class_sizes=tuple(sizes),
        irrep_labels=tuple(irreps),
        dims=dims,
        values=values,
        exact=exact,
    )
    validate(table)
    return table


def _cyclic(k: int) -> FiniteGroupTable:
    if not 1 <= k <= 12:
        raise TableError(f"cyclic({k}) not available; need 1 <= k <= 12")
    exact = k in (1, 2, 4)
    rows = []
    for j in range(k):
        row = []
        for g in range(k):
            e = (j * g) % k
            if exact:
                # powers of i or -1 are Gaussian integers
                w = {0: QComplex(1), 1: QComplex(0, 1), 2: QComplex(-1), 3: QComplex(0, -1)}
                row.append(w[(4 * e // k) % 4] if k != 1 else QComplex(1))
            else:
                z = cmath.exp(2j * math.pi * e / k)
                row.append(QComplex(Fraction(z.real).limit_denominator(10**15),
                                    Fraction(z.imag).limit_denominator(10**15)))
        rows.append(row)
    return _make(
        f"cyclic({k})",
        [f"g{g}" for g in range(k)],
        [1] * k,
        [f"chi{j}" for j in range(k)],
        rows,
        exact=exact,
    )


def _trivial() -> FiniteGroupTable:
    return _make("trivial", ["e"], [1], ["triv"], [[1]])


def _s3() -> FiniteGroupTable:
    return _make(
        "s3",
        ["e", "(12)", "(123)"],
        [1, 3, 2],
        ["triv", "sign", "std"],
        [[1, 1, 1], [1, -1, 1], [2, 0, -1]],
    )


def _dihedral4() -> FiniteGroupTable:
    # symmetries of the square, order 8
    return _make(
        "dihedral(4)",
        ["e", "r2", "r", "s", "sr"],
        [1, 1, 2, 2, 2],
        ["A1", "A2", "B1", "B2", "E"],
        [
            [1, 1, 1, 1, 1],
            [1, 1, 1, -1, -1],
            [1, 1, -1, 1, -1],
            [1, 1, -1, -1, 1],
            [2, -2, 0, 0, 0],
        ],
    )


_ALIASES = {
    "trivial": "trivial",
    "1": "trivial",
    "s3": "s3",
    "sym3": "s3",
    "dihedral(4)": "dihedral4",
    "dihedral4": "dihedral4",
    "d4": "dihedral4",
    "z2": "cyclic2",
}


def builtin_names() -> list[str]:
    return ["trivial", *[f"cyclic({k})" for k in range(1, 13)], "s3", "dihedral(4)"]


def builtin(name: str) -> FiniteGroupTable:
    """Return a built-in character table.

    Accepted names: ``trivial``, ``cyclic(k)`` / ``cyclicK`` / ``zK`` for
    k <= 12, ``s3``, ``dihedral(4)`` / ``d4``.
    """
    key = name.strip().lower().replace(" ", "")
    key = _ALIASES.get(key, key)
    if key == "trivial":
        return _trivial()
    if key == "s3":
        return _s3()
    if key == "dihedral4":
        return _dihedral4()
    m = re.fullmatch(r"(?:cyclic|z|c)\(?(\d+)\)?", key)
    if m:
        return _cyclic(int(m.group(1)))
    raise TableError(f"unknown builtin group {name!r}; choose from {', '.join(builtin_names())}")


# --- file format ----------------------------------------------------------------

def _parse_value(entry) -> QComplex:
    if not (isinstance(entry, list) and len(entry) == 4 and all(isinstance(x, int) for x in entry)):
        raise TableError(f"character value must be [re_num, re_den, im_num, im_den], got {entry!r}")
    rn, rd, imn, imd = entry
    if rd == 0 or imd == 0:
        raise TableError(f"zero denominator in character value {entry!r}")
    return QComplex(Fraction(rn, rd), Fraction(imn, imd))


def table_from_dict(data: dict) -> FiniteGroupTable:
    try:
        name = str(data["name"])
        classes = data["classes"]
        irreps = data["irreps"]
        raw = data["values"]
    except (KeyError, TypeError) as exc:
        raise TableError(f"group table missing field: {exc}") from None
    class_labels = tuple(str(c["label"]) for c in classes)
    class_sizes = tuple(int(c["size"]) for c in classes)
    irrep_labels = tuple(str(z["label"]) for z in irreps)
    dims = tuple(int(z["dim"]) for z in irreps)
    values = tuple(tuple(_parse_value(v) for v in row) for row in raw)
    exact = bool(data.get("exact", True))
    table = FiniteGroupTable(name, class_labels, class_sizes, irrep_labels, dims, values, exact)
    if "order" in data and int(data["order"]) != table.order:
        raise TableError(f"declared order {data['order']} != sum of class sizes {table.order}")
    fails = _orthogonality_failures(table)
    if fails and table.exact and "exact" not in data:
        # rational approximations of irrational characters: fall back to tolerance
        approx = FiniteGroupTable(name, class_labels, class_sizes, irrep_labels, dims, values, False)
        if not _orthogonality_failures(approx):
            return approx
    if fails:
        raise TableError(f"group table {name!r} invalid: " + "; ".join(fails))
    return table


def table_to_dict(table: FiniteGroupTable) -> dict:
    return {
        "name": table.name,
        "order": table.order,
        "classes": [{"label": l, "size": s} for l, s in zip(table.class_labels, table.class_sizes)],
        "irreps": [{"label": l, "dim": d} for l, d in zip(table.irrep_labels, table.dims)],
        "values": [
            [[v.re.numerator, v.re.denominator, v.im.numerator, v.im.denominator] for v in row]
            for row in table.values
        ],
    }


def load_table(path) -> FiniteGroupTable:
    """Load and validate a group table from a JSON file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"{path}: not valid JSON ({exc})") from None
    return table_from_dict(data)


def dump_table(table: FiniteGroupTable, path) -> None:
    Path(path).write_text(json.dumps(table_to_dict(table), indent=2) + "\n", encoding="utf-8")


def resolve_group(spec: str) -> FiniteGroupTable:
    """Builtin name or path to a JSON table."""
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        return load_table(p)
    return builtin(spec)
