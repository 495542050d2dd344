import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from resind import pausing
from resind.pausing import ClockMode, Exponential, Gamma, OneSidedStable


def test_half_stable_is_inverse_squared_normal():
    rng = np.random.default_rng(1)
    x = OneSidedStable(0.5).sample(rng, 200_000)
    # Laplace transform at s = 1 equals exp(-sqrt(2))
    est = np.exp(-x).mean()
    assert est == pytest.approx(math.exp(-math.sqrt(2)), abs=4e-3)
    # Levy distribution with scale 1 has this law
    assert stats.kstest(x, stats.levy(scale=1).cdf).pvalue > 1e-3


def test_general_alpha_laplace():
    rng = np.random.default_rng(2)
    d = OneSidedStable(0.7)
    x = d.sample(rng, 200_000)
    for s in (0.5, 1.0, 2.0):
        assert np.exp(-s * x).mean() == pytest.approx(d.laplace(s), abs=5e-3)


def test_jump_counts_match_single_time_counter():
    d = Gamma(2.0, 0.5)
    times = np.array([0.0, 1.0, 5.0, 2.5])
    a = pausing.jump_counts(d, times, np.random.default_rng(3))
    assert a[0] == 0 and a[1] <= a[3] <= a[2]
    many = np.array([pausing.jump_counts(d, [10.0], np.random.default_rng(i))[0] for i in range(2000)])
    assert many.mean() == pytest.approx(10.0 - 0.25, abs=0.2)  # renewal mean s/mu - (1 - cv^2)/2


def test_exponential_counts_are_poisson():
    rng = np.random.default_rng(4)
    d = Exponential(2.0)
    c = np.array([pausing.count_jumps(d, 7.0, rng) for _ in range(5000)])
    assert c.mean() == pytest.approx(3.5, abs=0.1)
    assert c.var() == pytest.approx(3.5, abs=0.3)


def test_a_exact_exponential_closed_form_and_mc():
    val, se = pausing.a_exact(3, 10, 4.0, Exponential(1.5))
    assert se == 0 and val == pytest.approx(math.exp(-3 * 4.0 / 15))
    # the Monte Carlo route agrees with the generating function
    mc, se = pausing.a_exact(3, 10, 4.0, Gamma(1.0, 1.5), np.random.default_rng(5), samples=20000)
    assert abs(mc - val) < 4 * se


def test_stable_a_three_routes():
    for k in (1, 2, 5):
        for t in (1e-3, 0.25, 1.0, 7.0):
            q = pausing.a_limit(k, t, "stable", alpha=0.5)
            g = pausing.a_stable_gauss(k, t)
            c = pausing.a_half_closed(k, t)
            direct = integrate.quad(lambda u: math.exp(-u * u / 2 - k * math.sqrt(t) * u), 0, np.inf)[0] \
                * math.sqrt(2 / math.pi)
            assert q == pytest.approx(c, abs=1e-9)
            assert g == pytest.approx(c, abs=1e-9)
            assert direct == pytest.approx(c, abs=1e-9)
    assert pausing.a_half_closed(2, 0.5) == pytest.approx(special.erfcx(1.0))


def test_stable_finite_n_converges():
    # a(k, n, t n^2) approaches a_k(t); the Gauss form is the n -> inf limit
    rng = np.random.default_rng(6)
    n, k, t = 60, 2, 0.5
    mc, se = pausing.a_exact(k, n, t * n * n, OneSidedStable(0.5), rng, samples=20000)
    assert abs(mc - pausing.a_limit(k, t, "stable")) < 4 * se + 0.02


def test_small_t_limit_is_one():
    assert pausing.a_limit(3, 1e-8, "stable") == pytest.approx(1.0, abs=1e-3)
    assert pausing.a_limit(3, 0.0, "diffusive") == 1.0


def test_clock():
    assert ClockMode("diffusive").tau(50) == 50
    assert ClockMode("stable", 0.5).tau(50) == 2500
    with pytest.raises(ValueError):
        ClockMode("other")
    with pytest.raises(ValueError):
        OneSidedStable(1.2)
