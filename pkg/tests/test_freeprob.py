import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from resind import freeprob
from resind.freeprob import CumulantSeq, LevyMeasure, RSeries, Uniform
from resind.groups import builtin


def _set_partitions(elems):
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _noncrossing(part):
    for A in part:
        for B in part:
            if A is B:
                continue
            for a1 in A:
                for a2 in A:
                    for b1 in B:
                        for b2 in B:
                            if a1 < b1 < a2 < b2:
                                return False
    return True


def _nc_moments(r, nmax):
    """M_n = sum over non-crossing partitions of prod R_{|block|}."""
    out = []
    for n in range(1, nmax + 1):
        tot = 0
        for p in _set_partitions(list(range(n))):
            if _noncrossing(p):
                prod = 1
                for b in p:
                    prod *= r[len(b) - 1]
                tot += prod
        out.append(tot)
    return out


def test_catalan_counts():
    ones = [1] * 7
    assert freeprob.cumulants_to_moments(ones) == [1, 2, 5, 14, 42, 132, 429]


def test_moments_match_noncrossing_partitions():
    r = [Fraction(1, 3), 2, Fraction(-1, 2), 1, 3, Fraction(5, 7)]
    assert freeprob.cumulants_to_moments(r) == _nc_moments(r, 6)


def test_semicircle_and_two_atom_examples():
    assert freeprob.moments_to_cumulants([0, 1, 0, 2, 0, 5]) == [0, 1, 0, 0, 0, 0]
    # Bernoulli on {-1, 1}: R_4 = -1
    assert freeprob.moments_to_cumulants([0, 1, 0, 1]) == [0, 1, 0, -1]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=20), min_size=1, max_size=8))
def test_roundtrip_exact(r):
    assert freeprob.moments_to_cumulants(freeprob.cumulants_to_moments(r)) == r


def test_compress_and_convolve():
    a = CumulantSeq((0, 1, 2, 3))
    b = CumulantSeq((1, 0, -1, 0))
    assert freeprob.convolve(a, b).r == (1, 1, 1, 3)
    c = freeprob.compress(a, Fraction(1, 2))
    assert c.r == (0, Fraction(1, 2), Fraction(1, 2), Fraction(3, 8))


def test_semicircle_stieltjes_closed_form():
    z = np.array([0.3 + 0.5j, -1.5 + 0.01j, 3 + 2j, 0.0 + 1e-3j])
    closed = (z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2
    assert np.max(np.abs(freeprob.stieltjes(freeprob.semicircle(1), z) - closed)) < 1e-10


def test_free_poisson_density():
    R = RSeries(CumulantSeq((1,) * 8), func=lambda w: 1 / (1 - w), deriv=lambda w: 1 / (1 - w) ** 2)
    x = np.linspace(0.3, 3.8, 50)
    dens = -freeprob.stieltjes(R, x + 1e-4j, eps_min=1e-5).imag / math.pi
    mp = np.sqrt(np.maximum((4 - x) * x, 0)) / (2 * math.pi * x)
    assert np.max(np.abs(dens - mp)) < 1e-3


def test_stieltjes_rejects_tiny_imaginary_part():
    with pytest.raises(freeprob.StieltjesError):
        freeprob.stieltjes(freeprob.semicircle(1), np.array([0.5 + 1e-6j]))


def test_levy_measure_moments_and_r_transform():
    l = LevyMeasure(atoms=((Fraction(1, 2), Fraction(1, 4)),), densities=(Uniform(-1, 1, 0.25),))
    for j in range(5):
        quad = integrate.quad(lambda x: x**j * 0.25, -1, 1)[0] + 0.25 * 0.5**j
        assert float(l.moment(j)) == pytest.approx(quad, abs=1e-12)
    c = freeprob.levy_to_r(l, 6)
    w = 0.1
    series = sum(float(c[k + 1]) * w**k for k in range(6))
    assert complex(l.r_transform(w)).real == pytest.approx(series, abs=1e-5)


def test_group_dualize_roundtrip():
    t = builtin("s3")
    seqs = [[Fraction(i + 1, k + 2) for k in range(4)] for i in range(3)]
    back = freeprob.group_dualize(t, "to_irreps", freeprob.group_dualize(t, "to_classes", seqs))
    assert [[complex(v) for v in row] for row in back] == [[complex(v) for v in row] for row in seqs]
    assert all(v == freeprob.QComplex.coerce(s) for row, srow in zip(back, seqs) for v, s in zip(row, srow))
