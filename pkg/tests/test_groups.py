import json
from fractions import Fraction

import numpy as np
import pytest

from resind.groups import (QComplex, TableError, builtin, builtin_names, dump_table, load_table,
                           plancherel_weights, resolve_group, table_from_dict, table_to_dict)


@pytest.mark.parametrize("name", builtin_names())
def test_row_orthogonality_numeric(name):
    t = builtin(name)
    X = np.array(t.complex_values())
    w = np.array(t.class_sizes) / t.order
    gram = (X * w) @ X.conj().T
    assert np.allclose(gram, np.eye(t.n_irreps), atol=1e-9)
    assert sum(d * d for d in t.dims) == t.order


def test_exactness_flags():
    assert builtin("z2").exact and builtin("s3").exact and builtin("d4").exact
    # a primitive cube root of unity has irrational imaginary part
    assert not builtin("z3").exact
    assert builtin("z4").exact


def test_plancherel_weights_sum_to_one():
    for name in ("trivial", "z2", "s3", "d4"):
        w = plancherel_weights(builtin(name))
        assert sum(w) == 1
        assert all(isinstance(x, Fraction) for x in w)


def test_qcomplex_arithmetic():
    a = QComplex(Fraction(1, 2), Fraction(3, 4))
    b = QComplex(2, -1)
    assert a * b == QComplex(Fraction(1, 2) * 2 + Fraction(3, 4), Fraction(3, 2) - Fraction(1, 2))
    assert (a * b) / b == a
    assert a.conjugate() == QComplex(Fraction(1, 2), Fraction(-3, 4))
    assert complex(a + b) == pytest.approx(complex(0.5, 0.75) + complex(2, -1))


def test_json_roundtrip(tmp_path):
    t = builtin("d4")
    path = tmp_path / "d4.json"
    dump_table(t, path)
    back = load_table(path)
    assert back.values == t.values and back.dims == t.dims and back.exact
    assert resolve_group(str(path)).class_sizes == t.class_sizes


def test_invalid_table_rejected():
    data = table_to_dict(builtin("z2"))
    data["values"][1][1] = [1, 1, 0, 1]  # breaks orthogonality
    with pytest.raises(TableError, match="invalid"):
        table_from_dict(data)
    data = table_to_dict(builtin("z2"))
    data["order"] = 3
    with pytest.raises(TableError):
        table_from_dict(data)
    with pytest.raises(TableError):
        table_from_dict({"name": "x"})
