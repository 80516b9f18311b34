import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from prolate.errors import DomainError
from prolate.geometry import (
    MetricPoint,
    ball_measure,
    ball_measure_surrogate,
    ball_metric,
    ball_volume_weighted,
    check_doubling,
    fit_double3_constant,
    integral_bound_check,
    rho,
    theta,
    theta_grid,
)

unit = st.floats(-1, 1)


def test_rho_examples():
    assert rho(1.0, -1.0) == pytest.approx(math.pi, abs=1e-15)
    assert rho(0.3, 0.3) == 0.0
    assert rho(0.0, 1 / math.sqrt(2)) == pytest.approx(math.pi / 4, abs=1e-15)
    with pytest.raises(DomainError):
        rho(1.5, 0.0)


@settings(max_examples=60, deadline=None)
@given(x=unit, y=unit, z=unit)
def test_rho_is_a_metric(x, y, z):
    assert rho(x, y) == rho(y, x)
    assert 0 <= rho(x, y) <= math.pi
    assert rho(x, z) <= rho(x, y) + rho(y, z) + 1e-15


@settings(max_examples=60, deadline=None)
@given(x=unit)
def test_theta_consistent(x):
    p = MetricPoint.at(x)
    assert abs(math.cos(p.theta) - x) <= 1e-14
    assert abs(theta(x) - math.acos(x)) <= 1e-14 or abs(x) > 0.999


def test_ball_measure_examples():
    for r in (0.01, 0.5, 1.0, math.pi):
        assert ball_measure(1.0, r) == pytest.approx(1 - math.cos(r), rel=1e-13)
    assert ball_measure(0.37, math.pi) == pytest.approx(2.0)
    assert ball_measure(0.0, 0.1) == pytest.approx(2 * math.sin(0.1), rel=1e-14)
    with pytest.raises(DomainError):
        ball_measure(0.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(x=unit, r=st.floats(1e-3, 4.0))
def test_ball_measure_is_lebesgue_measure(x, r):
    # independent route: integrate the indicator of {y : rho(x, y) < r} in y
    t = math.acos(x)
    lo, hi = max(0.0, t - r), min(math.pi, t + r)
    ref = quad(lambda s: math.sin(s), lo, hi)[0]
    v = ball_measure(x, r)
    assert v == pytest.approx(ref, rel=1e-12, abs=1e-15)
    assert 0 < v <= 2
    s = ball_measure_surrogate(x, r)
    if r <= 2:
        assert 0.25 <= v / s <= 4
    elif r <= math.pi:
        # near r = pi the surrogate keeps growing while V saturates at 2
        assert 0.125 <= v / s <= 4


def test_doubling():
    r = np.linspace(1e-3, math.pi / 2, 200)
    worst = check_doubling([1.0], r)
    assert 1 <= worst <= 4
    assert check_doubling([0.0], [1e-5]) == pytest.approx(2.0, rel=1e-6)
    assert check_doubling(theta_grid(31), [0.01, 0.1, 1.0]) >= 1


def test_double3_constant_stable():
    a = fit_double3_constant(theta_grid(21), [0.01, 0.1, 1.0])
    b = fit_double3_constant(theta_grid(41), [0.01, 0.1, 1.0])
    assert math.isfinite(a) and abs(b / a - 1) < 0.25


def test_integral_bound():
    for sigma in (3, 5):
        c = integral_bound_check(theta_grid(11), [0.05, 0.2, 1.0], sigma)
        assert math.isfinite(c) and c > 0


def test_ball_volume_weighted():
    assert ball_volume_weighted(0.0, 0.3, 0.0, 2) == pytest.approx(0.09)
    assert ball_volume_weighted(0.5, 0.1, 0.5, 3) == pytest.approx(0.001 * math.sqrt(0.76), rel=1e-14)


def test_ball_metric_examples():
    assert ball_metric(np.array([0.0, 0.0]), np.array([0.0, 0.0])) == pytest.approx(0.0, abs=1e-7)
    x, y = np.array([0.6, 0.0]), np.array([-0.6, 0.0])
    assert ball_metric(x, y) == pytest.approx(math.acos(-0.36 + 0.64), abs=1e-14)


def test_theta_grid_uniform_in_angle():
    g = theta_grid(9)
    assert np.allclose(np.diff(np.arccos(g[::-1])), math.pi / 8, atol=1e-14)
