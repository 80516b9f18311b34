import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import prolate.besov as bv
from prolate.besov import (
    ALTERNATE_WINDOWS,
    STANDARD_WINDOWS,
    BesovParams,
    DistributionCoeffs,
    DyadicWindowPair,
    besov_norm,
    block_coefficients,
    change_of_basis_matrix,
    dyadic_block,
    hardy_constant,
    hardy_inequality_check,
    maximal_peetre_check,
    tl_norm,
    window_independence,
)
from prolate.errors import DomainError
from prolate.heat import prolate_decomposition
from prolate.orthopoly import LEGENDRE, basis_matrix, gauss_rule

INF = math.inf


def single(n, basis="legendre", c=0.0):
    a = np.zeros(n + 1)
    a[n] = 1.0
    return DistributionCoeffs(basis, a, c)


def test_window_admissibility():
    for w in (STANDARD_WINDOWS, ALTERNATE_WINDOWS):
        l0, l1 = w.lower_bounds()
        assert l0 > 1e-3 and l1 > 1e-3  # strictly positive on the admissibility ranges
        lam = np.linspace(0, 50, 20001)
        assert not np.any(w.phi0(lam[lam >= 2]))
        ph = w.phi(lam)
        assert not np.any(ph[(lam < 0.5) | (lam > 2)])
        J = w.max_level(50)
        S = sum(w.psi_j(j, lam) * w.phi_j(j, lam) for j in range(J + 2))
        assert np.max(np.abs(S - 1)) < 1e-14
    with pytest.raises(DomainError):
        DyadicWindowPair(0.9, 2.0)


def test_reconstruction_from_dual_blocks():
    rng = np.random.default_rng(1)
    f = DistributionCoeffs("legendre", rng.standard_normal(40))
    prim = block_coefficients(f, "legendre", windows=STANDARD_WINDOWS)
    dual = block_coefficients(f, "legendre", windows=STANDARD_WINDOWS, dual=True)
    # sum_j Psi_j phi_j f = f with every block applied in the eigenbasis
    n = np.arange(40)
    lam = np.sqrt(n * (n + 1.0))
    recon = sum(STANDARD_WINDOWS.psi_j(j, lam) * prim[j] for j in range(len(prim)))
    assert np.max(np.abs(recon - f.coeffs)) < 1e-12
    assert len(dual) == len(prim)
    g = DistributionCoeffs("prolate", rng.standard_normal(12), 2.0)
    blocks = block_coefficients(g, "prolate", 2.0)
    x = np.linspace(-1, 1, 33)
    total = sum(b @ basis_matrix(LEGENDRE, len(b) - 1, x) for b in blocks)
    # the windows sum to less than one, so check against the exact multiplier sum instead
    dec = prolate_decomposition(2.0, 11)
    lam = np.sqrt(dec.chis[:12])
    m = sum(STANDARD_WINDOWS.phi_j(j, lam) for j in range(len(blocks)))
    ref = (m * g.coeffs) @ dec.evaluate(x, 12)
    assert np.max(np.abs(total - ref)) < 1e-10


def test_single_block_examples():
    # P_0: lam = 0 -> only phi_0, value 1
    f = single(0)
    x = np.linspace(-1, 1, 7)
    assert np.allclose(dyadic_block(f, 0, x), 1 / math.sqrt(2))
    assert not dyadic_block(f, 1, x).any()
    # P_1 has lam = sqrt 2 < 2^(3/4), split between j = 0 and j = 1
    g = single(1)
    lam = math.sqrt(2)
    b0 = dyadic_block(g, 0, x)
    b1 = dyadic_block(g, 1, x)
    P1 = math.sqrt(1.5) * x
    assert np.allclose(b0, STANDARD_WINDOWS.phi0(lam) * P1, atol=1e-15)
    assert np.allclose(b1, STANDARD_WINDOWS.phi(lam / 2) * P1, atol=1e-15)
    with pytest.raises(DomainError):
        dyadic_block(g, -1, x)


def test_zero_and_homogeneity():
    p = BesovParams(0.5, 2, 2)
    assert besov_norm(DistributionCoeffs("legendre", np.zeros(5)), p) == 0.0
    assert tl_norm(DistributionCoeffs("legendre", np.zeros(5)), p) == 0.0
    rng = np.random.default_rng(3)
    f = DistributionCoeffs("legendre", rng.standard_normal(20))
    for params in (p, BesovParams(1.0, 1, 0.5), BesovParams(0.3, 3, INF, "nonclassical")):
        assert besov_norm(f * -2.5, params) == pytest.approx(2.5 * besov_norm(f, params), rel=1e-9)


def test_single_legendre_norm_closed_form():
    # one eigenfunction: ||P_n||_p times the window weights
    n = 6
    lam = math.sqrt(n * (n + 1))
    w = [STANDARD_WINDOWS.phi_j(j, lam) for j in range(6)]
    q = gauss_rule(LEGENDRE, 40)
    Pn = basis_matrix(LEGENDRE, n, q.nodes)[n]
    Lp = np.sum(q.weights * np.abs(Pn) ** 2) ** 0.5
    s = 0.5
    ref = math.sqrt(sum((2 ** (s * j) * abs(v) * Lp) ** 2 for j, v in enumerate(w)))
    assert besov_norm(single(n), BesovParams(s, 2, 2)) == pytest.approx(ref, rel=1e-10)


def test_tl_equals_besov_when_p_equals_q():
    rng = np.random.default_rng(4)
    f = DistributionCoeffs("legendre", rng.standard_normal(24) / (1 + np.arange(24)))
    for s, p in ((0.5, 2.0), (1.0, 1.0), (0.2, 3.0)):
        params = BesovParams(s, p, p)
        assert tl_norm(f, params) == pytest.approx(besov_norm(f, params), rel=1e-7)


def test_c0_ratio_is_one():
    rng = np.random.default_rng(5)
    f = DistributionCoeffs("legendre", rng.standard_normal(30))
    for params in (BesovParams(0.5, 2, 2), BesovParams(0.3, 1, INF), BesovParams(0.7, 2, 2, "nonclassical")):
        a = besov_norm(f, params.with_kind("legendre"))
        b = besov_norm(f, params.with_kind("prolate", 0.0))
        assert abs(a / b - 1) < 1e-10


def test_change_of_basis_consistency():
    c = 1.5
    rng = np.random.default_rng(6)
    a = rng.standard_normal(10)
    g = DistributionCoeffs("prolate", a, c)
    # independent route: prolate coefficients from evaluating g and projecting onto psi_n by quadrature
    q = gauss_rule(LEGENDRE, 80)
    dec = prolate_decomposition(c, 30)
    vals = a @ dec.evaluate(q.nodes, 10)
    leg = (basis_matrix(LEGENDRE, 40, q.nodes) * q.weights) @ vals
    back = DistributionCoeffs("legendre", leg).to_basis("prolate", c)
    assert np.max(np.abs(back.coeffs[:10] - a)) < 1e-12
    assert np.max(np.abs(back.coeffs[10:])) < 1e-12
    G = change_of_basis_matrix(c, 10)
    assert np.max(np.abs(G @ G.T - np.eye(11))) < 1e-12
    x = np.linspace(-1, 1, 17)
    assert np.max(np.abs(g(x) - g.to_basis("legendre")(x))) < 1e-12


def test_quadrature_reproducible():
    rng = np.random.default_rng(7)
    f = DistributionCoeffs("legendre", rng.standard_normal(33))
    p = BesovParams(0.3, 1, INF)
    a = besov_norm(f, p)
    old = bv.GAUSS_ORDER
    try:
        bv.GAUSS_ORDER = 40
        b = besov_norm(f, p)
    finally:
        bv.GAUSS_ORDER = old
    assert abs(a / b - 1) < 1e-7


def test_window_independence():
    for params in (BesovParams(0.5, 2, 2), BesovParams(1.0, 2, 1)):
        rep = window_independence(params, 32, 1.0)
        assert 0.5 < rep["min_ratio"] <= rep["max_ratio"] < 2.0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**6), q=st.sampled_from([0.5, 1.0, 2.0]))
def test_quasi_triangle(seed, q):
    rng = np.random.default_rng(seed)
    f = DistributionCoeffs("legendre", rng.standard_normal(16))
    g = DistributionCoeffs("legendre", rng.standard_normal(16))
    params = BesovParams(0.5, 2, q)
    lhs = besov_norm(f + g, params)
    r = min(1.0, q)
    # quasi-norm: ||f+g||^r <= ||f||^r + ||g||^r for r = min(1, p, q)
    assert lhs**r <= besov_norm(f, params) ** r + besov_norm(g, params) ** r + 1e-9


def test_monotone_in_smoothness():
    rng = np.random.default_rng(8)
    f = DistributionCoeffs("legendre", rng.standard_normal(40))
    vals = [besov_norm(f, BesovParams(s, 2, 2)) for s in (0.0, 0.5, 1.0, 1.5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_peetre_maximal_stability():
    rng = np.random.default_rng(9)
    for t in (0.5, 1.0):
        cs = []
        for N in (8, 16, 32):
            a = np.zeros(N + 1)
            a[N // 2:] = rng.standard_normal(N + 1 - N // 2)
            g = DistributionCoeffs("legendre", a)
            rep = maximal_peetre_check(g, N, t)
            assert math.isfinite(rep["c"]) and rep["n_points"] > 0
            cs.append(rep["c"])
        assert max(cs) / min(cs) < 4


def test_hardy_examples():
    assert hardy_constant(1.0, 2.0) == pytest.approx(2.0)
    assert hardy_constant(1.0, 0.5) == pytest.approx((1 / (1 - 2**-0.5)) ** 2)
    rep = hardy_inequality_check([1.0], 1.0, 1.0)
    assert rep["lhs1"] == pytest.approx(2.0) and rep["rhs"] == pytest.approx(2.0)
    geo = hardy_inequality_check(2.0 ** -np.arange(20), 1.0, 2.0)
    assert geo["holds"]
    rng = np.random.default_rng(10)
    for q in (0.5, 1.0, INF):
        assert hardy_inequality_check(rng.uniform(0, 1, 30), 1.0, q)["holds"]
    with pytest.raises(DomainError):
        hardy_inequality_check([-1.0], 1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), beta=st.floats(0.1, 3.0), q=st.floats(0.2, 4.0))
def test_hardy_property(seed, beta, q):
    a = np.random.default_rng(seed).uniform(0, 1, 12)
    assert hardy_inequality_check(a, beta, q)["holds"]


def test_params_validation():
    with pytest.raises(DomainError):
        BesovParams(0.5, 0, 2)
    with pytest.raises(DomainError):
        BesovParams(0.5, 2, 2, "odd")
    with pytest.raises(DomainError):
        tl_norm(single(3), BesovParams(0.5, INF, 2))
    assert BesovParams(0.3, 1, INF).to_dict()["q"] == "inf"
