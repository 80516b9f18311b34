import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from prolate.errors import DomainError
from prolate.orthopoly import (
    LEGENDRE,
    BasisSpec,
    basis_matrix,
    basis_matrix_with_derivative,
    eval_jacobi_normalized,
    eval_legendre_normalized,
    gauss_rule,
    legendre_x_coupling,
    series_eval,
    weight_mass,
)

params = st.floats(-0.9, 3.0)


def jacobi_oracle(a, b, n, x):
    # classical Jacobi over its closed-form norm
    h = 2 ** (a + b + 1) / (2 * n + a + b + 1) * math.exp(
        math.lgamma(n + a + 1) + math.lgamma(n + b + 1) - math.lgamma(n + a + b + 1) - math.lgamma(n + 1))
    if n == 0:
        h = 2 ** (a + b + 1) * math.exp(math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2))
    return sp.eval_jacobi(n, a, b, x) / math.sqrt(h)


def test_legendre_examples():
    assert eval_legendre_normalized(0, 0.3) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert eval_legendre_normalized(5, 1.0) == pytest.approx(math.sqrt(5.5), abs=1e-14)
    assert abs(eval_legendre_normalized(7, 0.42)) <= math.sqrt(3 / math.pi) * (1 - 0.42**2) ** -0.25


def test_legendre_matches_scipy():
    x = np.linspace(-1, 1, 101)
    for n in range(0, 80, 7):
        ref = sp.eval_legendre(n, x) * math.sqrt(n + 0.5)
        assert np.max(np.abs(eval_legendre_normalized(n, x) - ref)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(a=params, b=params, n=st.integers(0, 25), x=st.floats(-1, 1))
def test_jacobi_matches_closed_form(a, b, n, x):
    spec = BasisSpec("jacobi", a, b)
    val = eval_jacobi_normalized(spec, n, x)
    ref = jacobi_oracle(a, b, n, x)
    assert val == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_jacobi_examples():
    j00 = BasisSpec("jacobi", 0.0, 0.0)
    assert eval_jacobi_normalized(j00, 3, 0.5) == pytest.approx(eval_legendre_normalized(3, 0.5), abs=1e-12)
    assert eval_jacobi_normalized(BasisSpec("jacobi", 1, 1), 0, 0.123) == pytest.approx(math.sqrt(0.75), abs=1e-14)
    assert weight_mass(BasisSpec("jacobi", 1, 1)) == pytest.approx(4 / 3, abs=1e-14)
    spec = BasisSpec("jacobi", 0.5, 0.5)
    q = gauss_rule(spec, 64)
    p2 = eval_jacobi_normalized(spec, 2, q.nodes)
    assert np.sum(q.weights * p2 * p2) == pytest.approx(1.0, abs=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_legendre_normalized(2, 1.5)
    with pytest.raises(DomainError):
        eval_legendre_normalized(-1, 0.0)
    with pytest.raises(DomainError):
        BasisSpec("jacobi", -1.0, 0.0)


def test_gauss_examples():
    q1 = gauss_rule(LEGENDRE, 1)
    assert q1.nodes[0] == pytest.approx(0.0, abs=1e-15) and q1.weights[0] == pytest.approx(2.0)
    q2 = gauss_rule(LEGENDRE, 2)
    assert np.allclose(q2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(q2.weights, [1, 1], atol=1e-15)
    q20 = gauss_rule(LEGENDRE, 20)
    assert abs(np.sum(q20.weights * q20.nodes**38) - 2 / 39) <= 1e-13


@settings(max_examples=25, deadline=None)
@given(a=params, b=params, n=st.integers(1, 30))
def test_gauss_rule_structure_and_exactness(a, b, n):
    spec = BasisSpec("jacobi", a, b)
    q = gauss_rule(spec, n)
    assert np.all(np.diff(q.nodes) > 0) and np.all(q.weights > 0)
    nodes, weights = sp.roots_jacobi(n, a, b)
    assert np.allclose(q.nodes, nodes, atol=1e-12)
    assert np.allclose(q.weights, weights, rtol=1e-9, atol=1e-14)
    # monomial moments of the weight in extended precision (x = 2u - 1, beta integrals)
    for k in (0, 1, 2 * n - 2, 2 * n - 1):
        if k < 0:
            continue
        exact = float(jacobi_moment(a, b, k))
        got = np.sum(q.weights * q.nodes**k)
        assert got == pytest.approx(exact, rel=1e-10, abs=1e-12)


def jacobi_moment(a, b, k):
    with mpmath.workdps(60):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        return 2 ** (a + b + 1) * mpmath.fsum(
            mpmath.binomial(k, i) * 2**i * (-1) ** (k - i) * mpmath.beta(i + b + 1, a + 1) for i in range(k + 1))


def test_orthonormal_gram():
    for spec in (LEGENDRE, BasisSpec("jacobi", 0.5, -0.3), BasisSpec("jacobi", 2.0, 1.5)):
        q = gauss_rule(spec, 64)
        B = basis_matrix(spec, 60, q.nodes)
        G = (B * q.weights) @ B.T
        assert np.max(np.abs(G - np.eye(61))) < 1e-11


def test_coupling_and_recurrence():
    assert legendre_x_coupling(0) == pytest.approx(1 / math.sqrt(3), abs=1e-16)
    a = [legendre_x_coupling(n) for n in range(200)]
    assert all(u < v for u, v in zip(a, a[1:])) or all(u > v for u, v in zip(a, a[1:]))
    assert abs(a[-1] - 0.5) < 1e-4
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, 50)
    res = x * eval_legendre_normalized(3, x) - legendre_x_coupling(3) * eval_legendre_normalized(4, x) \
        - legendre_x_coupling(2) * eval_legendre_normalized(2, x)
    assert np.max(np.abs(res)) < 1e-13


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 120), x=st.floats(-0.999, 0.999))
def test_parity_and_endpoint_bounds(n, x):
    v = eval_legendre_normalized(n, x)
    assert abs(eval_legendre_normalized(n, -x) - (-1) ** n * v) < 1e-13 * max(1, abs(v))
    assert abs(v) <= math.sqrt(n + 0.5) + 1e-12
    assert abs(v) <= math.sqrt(3 / math.pi) * (1 - x * x) ** -0.25 + 1e-12


def test_derivative_matches_finite_differences():
    spec = BasisSpec("jacobi", 0.5, -0.3)
    x = np.linspace(-0.95, 0.95, 41)
    h = 1e-6
    B, D = basis_matrix_with_derivative(spec, 20, x)
    fd = (basis_matrix(spec, 20, x + h) - basis_matrix(spec, 20, x - h)) / (2 * h)
    assert np.max(np.abs(D - fd) / (1 + np.abs(D))) < 1e-6
    assert np.allclose(B, basis_matrix(spec, 20, x), atol=0)


def test_series_eval_clenshaw():
    rng = np.random.default_rng(3)
    c = rng.normal(size=30)
    x = np.linspace(-1, 1, 77)
    spec = BasisSpec("jacobi", 1.5, 0.5)
    ref = c @ basis_matrix(spec, 29, x)
    assert np.max(np.abs(series_eval(spec, c, x) - ref)) < 1e-13 * np.max(np.abs(ref))
