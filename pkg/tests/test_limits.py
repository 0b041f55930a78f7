import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import hyp2f1

from gwheavy import heavy, limits
from gwheavy.errors import DomainError
from gwheavy.offspring import make_named
from gwheavy.sampler import make_rng, sample_conditional
from gwheavy.tree import contour_process, from_degrees

# closed form of phi(1/2) and a hypergeometric representation of phi(q),
# both independent of the quadrature
PHI_HALF = 2 * math.sqrt(2 / math.pi) * (math.sqrt(2) - math.log(1 + math.sqrt(2)))


def phi_hyp(q):
    return 4 / math.sqrt(math.pi) * hyp2f1(-0.5, 1.5 - q, 0.5, 0.5)


def theta_direct_symmetric(x, J=200):
    j = np.arange(-J, J + 1)
    return float(np.sum((1 - 2 * j**2 * x**2) * np.exp(-(j**2) * x**2)))


def test_phi_closed_form():
    assert abs(limits.phi(0.5) - PHI_HALF) <= 1e-8
    assert PHI_HALF == pytest.approx(0.850290, abs=1e-6)


@pytest.mark.parametrize("q", [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 5.0])
def test_phi_hypergeometric_oracle(q):
    assert limits.phi(q) == pytest.approx(phi_hyp(q), abs=1e-10)


def test_phi_half_integers():
    # phi((2l+1)/2) sqrt(pi) is rational; compare against the hypergeometric value
    for l in range(4):
        q = (2 * l + 1) / 2
        assert limits.phi(q) * math.sqrt(math.pi) == pytest.approx(phi_hyp(q) * math.sqrt(math.pi), abs=1e-9)


def test_phi_small_and_monotone():
    assert limits.phi(1e-8) < 1e-6
    grid = [limits.phi(q) for q in np.arange(0.25, 3.01, 0.25)]
    assert all(a < b for a, b in zip(grid, grid[1:]))
    with pytest.raises(DomainError):
        limits.phi(0)
    with pytest.raises(DomainError):
        limits.phi(-1)


def test_moments():
    assert limits.t_infinity_moment(0) == 1.0
    assert limits.t_infinity_moment(1) == pytest.approx(1 / PHI_HALF, abs=1e-10)
    assert limits.t_infinity_moment(1) == pytest.approx(1.17607, abs=1e-5)
    # recorded fixture: 2 / (phi(1/2) phi(1)), phi(1) = sqrt(8/pi)
    assert limits.t_infinity_moment(2) == pytest.approx(2 / (PHI_HALF * math.sqrt(8 / math.pi)), abs=1e-10)
    assert limits.t_infinity_moment(2) == pytest.approx(1.4739850607, abs=1e-9)
    with pytest.raises(DomainError):
        limits.t_infinity_moment(-1)


def test_moments_log_convex():
    m = [limits.t_infinity_moment(k) for k in range(9)]
    assert all(x > 0 for x in m)
    for k in range(1, 8):
        assert m[k] ** 2 <= m[k - 1] * m[k + 1] * (1 + 1e-12)


def test_theta_limits():
    assert limits.theta_cdf(50.0) == 1.0
    assert limits.theta_cdf(1e-3) == 0.0
    assert limits.theta_cdf(0.05) < 1e-100
    with pytest.raises(DomainError):
        limits.theta_cdf(0)
    with pytest.raises(DomainError):
        limits.theta_cdf([1.0, -2.0])


@pytest.mark.parametrize("x", [0.6, 0.8, 1.0, 1.3, 2.0, 3.0, 5.0])
def test_theta_matches_symmetric_sum(x):
    assert limits.theta_cdf(x) == pytest.approx(theta_direct_symmetric(x), abs=1e-12)


def test_theta_monotone_in_unit_interval():
    xs = np.arange(0.1, 5.0001, 0.01)
    v = limits.theta_cdf(xs)
    assert v.shape == xs.shape
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) >= 0)


def test_theta_mean():
    # the theta law has mean sqrt(pi)
    from scipy import integrate

    mean, _ = integrate.quad(lambda x: 1 - limits.theta_cdf(x), 0, 20, limit=200)
    assert mean == pytest.approx(math.sqrt(math.pi), abs=1e-8)


def test_fragmentation_seven():
    t = from_degrees([3, 0, 1, 0, 2, 0, 0])
    tr = limits.heavy_fragmentation(contour_process(t), 1)
    assert tr.measures.tolist() == [12.0, 5.0, 1.0]
    assert tr.levels.tolist() == [0.0, 0.5, 1.5]
    assert tr.t_infinity == 2
    assert tr.zeta([5, 4, 0.5]).tolist() == [0.5, 1.5, 2.0]


def test_fragmentation_tent_and_path():
    tent = np.r_[np.arange(0, 10), np.arange(10, -1, -1)].astype(float)
    assert limits.heavy_fragmentation(tent, 1).t_infinity == 10
    assert limits.heavy_fragmentation(tent * 0.5, 0.5, dx=0.25).t_infinity == 5
    n = 40
    path = from_degrees([1] * (n - 1) + [0])
    assert limits.heavy_fragmentation(contour_process(path), 1).t_infinity == n - 1


def test_fragmentation_errors():
    for bad in ([0], [1, 0, 0], [0, -1, 0], [0, np.nan, 0], [[0, 1, 0]]):
        with pytest.raises(DomainError):
            limits.heavy_fragmentation(np.asarray(bad, dtype=float), 1)
    with pytest.raises(DomainError):
        limits.heavy_fragmentation([0, 1, 0], 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 300), st.integers(0, 2**32))
def test_fragmentation_equals_heavy_path(n, seed):
    t = sample_conditional(make_named("catalan"), n, make_rng(seed))
    tr = limits.heavy_fragmentation(contour_process(t), 1)
    prof = heavy.heavy_path(t)
    assert tr.t_infinity == prof.length
    assert np.all(np.diff(tr.measures) <= 0)
    assert tr.measures[0] == 2 * n - 2
    assert tr.measures[1:].tolist() == (2 * prof.sizes[1:] - 1).tolist()


def test_fit_power_law_exact():
    xs = np.array([1.0, 10, 100, 1000, 1e4])
    f = limits.fit_power_law(np.c_[xs, xs ** (1 / 3)])
    assert abs(f.slope - 1 / 3) <= 1e-12 and f.r2 == pytest.approx(1)
    f = limits.fit_power_law(np.c_[xs, 5 * xs**2])
    assert f.slope == pytest.approx(2, abs=1e-12) and f.intercept == pytest.approx(math.log(5), abs=1e-12)


def test_fit_power_law_noise():
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(200):
        xs = np.geomspace(10, 1e5, 12)
        ys = 3 * xs**0.4 * np.exp(rng.normal(0, 0.1, xs.size))
        lo, hi = limits.fit_power_law(np.c_[xs, ys]).slope_ci()
        hits += lo <= 0.4 <= hi
    # normal approximation with 10 degrees of freedom slightly undercovers
    assert hits / 200 >= 0.88


def test_fit_power_law_errors():
    with pytest.raises(DomainError):
        limits.fit_power_law([(1, 1), (2, 2)])
    with pytest.raises(DomainError):
        limits.fit_power_law([(1, 1), (2, 0), (3, 3)])
    with pytest.raises(DomainError):
        limits.fit_power_law([(2, 1), (2, 2), (2, 3)])
