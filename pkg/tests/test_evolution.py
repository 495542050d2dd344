import math

import numpy as np
import pytest

from resind import evolution, freeprob, pausing
from resind.evolution import EvolutionSpec, PresetError, ensemble_preset
from resind.freeprob import CumulantSeq
from resind.groups import builtin


def test_half_line_rule_gaussian_moments():
    u, w = evolution.half_line_rule()
    for k in range(7):
        exact = 2 ** (k / 2) * math.gamma((k + 1) / 2) / math.sqrt(math.pi)
        assert np.dot(w, u**k) == pytest.approx(exact, rel=1e-12)
    # E exp(-c |U|) is the kinked case that defeats Gauss-Hermite
    c = 1.7
    assert np.dot(w, np.exp(-c * u)) == pytest.approx(math.exp(c * c / 2) * math.erfc(c / math.sqrt(2)), rel=1e-12)


def test_spec_validation():
    t = builtin("z2")
    with pytest.raises(ValueError, match="R_1"):
        EvolutionSpec(t, [CumulantSeq((0.1, 0.5)), CumulantSeq((0, 0.5))])
    with pytest.raises(ValueError, match="sum to 1"):
        EvolutionSpec(t, [CumulantSeq((0, 0.5)), CumulantSeq((0, 0.6))])
    with pytest.raises(ValueError):
        EvolutionSpec(t, [CumulantSeq((0, 1))])


def test_preset_constraints_named():
    t = builtin("z2")
    with pytest.raises(PresetError, match="a \\+ b <= c"):
        ensemble_preset("P2", t, a=[0.4, 0.5], b=[0.2, 0], c=[0.5, 0.5])
    with pytest.raises(PresetError, match="sum of c"):
        ensemble_preset("P3", t, a=[0, 0], b=[0, 0], c=[0.5, 0.6])
    with pytest.raises(PresetError, match="r > 0"):
        ensemble_preset("P2", t, r=0)
    # b = 0 is allowed
    ensemble_preset("P2", t, a=[0.5, 0.2], b=[0, 0], c=[0.5, 0.5])


def test_long_time_limit_is_semicircle():
    p = ensemble_preset("P3", builtin("s3"), a=[1 / 6, 0.1, 0.3], b=[0, 0.05, 0.2], c=[1 / 6, 1 / 6, 2 / 3])
    for clock in ("exponential", "stable_half"):
        spec = p.spec(clock)
        for c, s2 in zip(evolution.evolve_cumulants(spec, 1e6), spec.sigma2):
            r = c.as_float()
            assert r[1] == pytest.approx(float(s2), abs=1e-6)
            assert np.max(np.abs(r[2:])) < 1e-2


def test_exponential_flow_moves_atoms_geometrically():
    p = ensemble_preset("P2", builtin("trivial"), a=[0.6], b=[0.3], c=[1.0], r=2.0, rp=0.5)
    spec = p.spec("exponential", m=1.5)
    t = 0.8
    q = math.exp(-t / 1.5)
    lt = evolution.levy_flow_exponential(spec.levy[0], t, 1.5, spec.sigma2[0])
    # atom a at a/r moves to (q a / r) with mass q a
    assert lt.atom_at(q * 0.6 / 2.0) == pytest.approx(q * 0.6)
    assert lt.atom_at(-q * 0.3 / 0.5) == pytest.approx(q * 0.3)
    assert float(lt.total_mass) == pytest.approx(1.0)


def test_stable_flow_moments():
    p = ensemble_preset("P3", builtin("z2"), a=[0.4, 0.3], b=[0.1, 0.2], c=[0.5, 0.5], r=1.3, rp=0.7)
    spec = p.spec("stable_half")
    for t in (0.1, 2.0):
        for z, l0 in enumerate(spec.levy):
            lt = evolution.levy_flow_stable(l0, t, spec.sigma2[z])
            for k in range(2, 6):
                assert lt.moment(k - 1) == pytest.approx(pausing.a_half_closed(k, t) * l0.moment(k - 1), abs=1e-9)


def test_pde_scaling():
    spec = EvolutionSpec(builtin("trivial"), [CumulantSeq((0, 1, 0.2, -0.5, 0, 0.3))])
    z = 0.4 + 0.9j
    r2 = abs(evolution.pde_residual(spec, 1.0, z, h=2e-2))
    r1 = abs(evolution.pde_residual(spec, 1.0, z, h=1e-2))
    assert 3 < r2 / r1 < 5
    with pytest.raises(ValueError):
        evolution.pde_residual(spec, 1.0, 0.4 + 0.01j)


def test_taylor_coefficients():
    c = evolution.taylor_coefficients(lambda w: np.log(1 - np.asarray(w) / 2), 6, radius=0.5)
    assert np.allclose(c, [0] + [-(0.5**k) / k for k in range(1, 6)], atol=1e-12)
