import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from prolate.errors import DomainError, SandwichViolation
from prolate.geometry import ball_measure, theta_grid
from prolate.heat import (
    envelope_ratio,
    eval_heat_kernel,
    fit_envelope_bands,
    fit_gaussian_envelope,
    fit_gradient_shape,
    davies_gaffney_check,
    gaussian_convolution_constant,
    heat_terms_needed,
    prolate_decomposition,
    row_integrals,
    series_tail_bound,
    spectral_kernel,
    verify_holder_alpha1,
    verify_pswf_sandwich,
)
from prolate.orthopoly import LEGENDRE, gauss_rule

GRID = theta_grid(41)


def test_legendre_kernel_direct_sum():
    # independent route: scipy Legendre values summed in long form
    x = np.linspace(-1, 1, 9)
    t = 0.05
    n = np.arange(400)
    P = sp.eval_legendre(n[:, None], x[None, :]) * np.sqrt(n + 0.5)[:, None]
    ref = (P * np.exp(-t * n * (n + 1.0))[:, None]).T @ P
    K = eval_heat_kernel("legendre", t, x, x)
    assert np.max(np.abs(K.values - ref)) < 1e-11 * np.max(ref)


def test_tail_bound_is_certified():
    x = theta_grid(21)
    for t in (0.01, 0.1, 1.0):
        N = heat_terms_needed(t)
        dec = prolate_decomposition(2.0, 3 * N)
        K = eval_heat_kernel("prolate", t, x, x, decomposition=dec, c=2.0)
        w = np.exp(-t * dec.chis)
        long, _ = spectral_kernel(dec, w, x, x)
        assert np.max(np.abs(long - K.values)) <= K.series_tail_bound + np.max(K.rounding_bound)
        assert K.series_tail_bound < 1e-12 * np.max(np.abs(K.values))
    assert series_tail_bound(0.1, heat_terms_needed(0.1), 1.0) < 1e-15


def test_large_t_limit():
    x = theta_grid(11)
    K = eval_heat_kernel("prolate", 10.0, x, x, c=1.5)
    dec = prolate_decomposition(1.5, 5)
    psi0 = dec.evaluate(x, 1)[0]
    ref = math.exp(-10 * dec.chis[0]) * np.outer(psi0, psi0)
    assert np.max(np.abs(K.values - ref) / np.abs(ref)) < 1e-8


def test_markov_and_defect():
    x = theta_grid(31)
    for t in (0.01, 0.1, 1.0):
        assert np.max(np.abs(row_integrals("legendre", t, x) - 1)) < 1e-8
    assert np.all(row_integrals("prolate", 0.1, x, c=2.0) < 1 - 1e-6)
    # the series route agrees with quadrature in y
    q = gauss_rule(LEGENDRE, 200)
    K = eval_heat_kernel("prolate", 0.1, x, q.nodes, c=2.0)
    assert np.max(np.abs(K.values @ q.weights - row_integrals("prolate", 0.1, x, c=2.0))) < 1e-10


def test_symmetry_positivity():
    for kind, c in (("legendre", 0.0), ("prolate", 3.0)):
        K = eval_heat_kernel(kind, 0.05, GRID, GRID, c=c)
        assert np.max(np.abs(K.values - K.values.T)) <= K.series_tail_bound + 1e-14 * np.max(K.values)
        assert K.values.min() >= -K.error_bound.max()


def test_chapman_kolmogorov_and_trace():
    q = gauss_rule(LEGENDRE, 128)
    x = theta_grid(9)
    c = 1.0
    t1, t2 = 0.1, 0.3
    A = eval_heat_kernel("prolate", t1, x, q.nodes, c=c).values
    B = eval_heat_kernel("prolate", t2, q.nodes, x, c=c).values
    C = eval_heat_kernel("prolate", t1 + t2, x, x, c=c).values
    assert np.max(np.abs((A * q.weights) @ B - C)) < 1e-9
    t = 0.2
    D = eval_heat_kernel("prolate", t, q.nodes, q.nodes, c=c).values
    dec = prolate_decomposition(c, 60)
    assert np.sum(q.weights * np.diag(D)) == pytest.approx(np.sum(np.exp(-t * dec.chis)), abs=1e-9)


def test_sandwich_grid():
    for c in (1.0, 3.0):
        rep = verify_pswf_sandwich(c, [0.01, 0.05, 0.1, 0.5, 1.0], GRID)
        assert rep["passed"]
        assert rep["min_ratio_over_exp"] >= 1 - 1e-9 and rep["max_ratio"] <= 1 + 1e-9
    rep0 = verify_pswf_sandwich(0.0, [0.1], GRID)
    assert abs(rep0["worst_lower_slack"] - rep0["per_t"][0]["eps_max"]) < 1e-12 + rep0["per_t"][0]["eps_max"]


def test_sandwich_reports_violation_tuple(monkeypatch):
    import prolate.heat as heat

    real = heat.eval_heat_kernel

    def inflated(kind, t, x, y, decomposition=None, c=0.0):
        K = real(kind, t, x, y, decomposition, c)
        if kind == "prolate":
            K.values[0, 0] *= 1.5
        return K

    monkeypatch.setattr(heat, "eval_heat_kernel", inflated)
    with pytest.raises(SandwichViolation) as err:
        heat.verify_pswf_sandwich(1.0, [0.1], GRID)
    assert {"t", "x", "y", "p_t", "k0"} <= set(err.value.detail)


def test_envelope_fit_stability():
    for kind in ("legendre", "prolate"):
        coarse = fit_envelope_bands(kind, 0.05, 41, c=1.0)
        fine = fit_envelope_bands(kind, 0.05, 81, c=1.0)
        for a, b in zip(coarse, fine):
            for k in ("c1", "c2", "c3", "c4"):
                assert abs(getattr(b, k) / getattr(a, k) - 1) < 0.25
            assert a.c1 <= a.c3
        for k in ("c1", "c2", "c3", "c4"):
            vals = [getattr(f, k) for f in coarse]
            assert max(vals) / min(vals) - 1 < 0.25


def test_envelope_diagonal_and_outer_property():
    c = 1.0
    ts = [0.05, 0.1, 0.2]
    fit = fit_gaussian_envelope("prolate", ts, 41, c)
    for t in ts:
        K = eval_heat_kernel("prolate", t, GRID, GRID, c=c)
        r, rho, mask = envelope_ratio(K)
        d = np.diag(r)
        assert np.all(d >= fit.c1 * math.exp(-t * c * c) - 1e-12) and np.all(d <= fit.c3 + 1e-12)
        assert np.all(r[mask] <= fit.c3 * np.exp(-rho[mask] ** 2 / (fit.c4 * t)) * (1 + 1e-12))
        lower = fit.c1 * math.exp(-t * c * c) * np.exp(-rho[mask] ** 2 / (fit.c2 * t))
        assert np.all(r[mask] >= lower * (1 - 1e-12))


def test_envelope_c0_consistency():
    a = fit_gaussian_envelope("legendre", [0.05, 0.1], 41)
    b = fit_gaussian_envelope("prolate", [0.05, 0.1], 41, c=0.0)
    for k in ("c1", "c2", "c3", "c4"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), rel=1e-6)


def test_holder_alpha1():
    ts = [0.05, 0.1, 0.2]
    out = {}
    for kind in ("legendre", "prolate"):
        fit = fit_gaussian_envelope(kind, ts, 41, 1.0)
        a = verify_holder_alpha1(kind, ts, 41, 2 * fit.c4, 1.0)["C"]
        b = verify_holder_alpha1(kind, ts, 81, 2 * fit.c4, 1.0)["C"]
        assert math.isfinite(a) and abs(b / a - 1) < 0.25
        out[kind] = a
    assert 0.5 <= out["prolate"] / out["legendre"] <= 2


def test_gradient_shape():
    a = fit_gradient_shape([0.05, 0.1, 0.2], 41)
    b = fit_gradient_shape([0.05, 0.1, 0.2], 81)
    assert math.isfinite(a) and abs(b / a - 1) < 0.25


def test_davies_gaffney():
    fit = fit_gaussian_envelope("prolate", [0.05, 0.1, 0.2], 41, 1.0)
    pairs = [((-1.0, -0.5), (0.5, 1.0)), ((-1.0, 0.2), (-0.3, 0.6)), ((-0.9, -0.7), (0.0, 0.3))]
    rep = davies_gaffney_check(1.0, [0.05, 0.2], pairs, 1.0 / fit.c4)
    assert rep["passed"]
    overlap = [r for r in rep["rows"] if r["r"] == 0]
    assert all(r["bound"] == pytest.approx(math.sqrt(1.2 * 0.9)) for r in overlap)


def test_gaussian_convolution_bound():
    x = theta_grid(15)
    c1 = gaussian_convolution_constant(x, x, 0.1, [0.02, 0.05, 0.08], 4.0, 8.0)
    c2 = gaussian_convolution_constant(theta_grid(29), theta_grid(29), 0.1, [0.02, 0.05, 0.08], 4.0, 8.0)
    assert math.isfinite(c1) and abs(c2 / c1 - 1) < 0.25


def test_domain():
    with pytest.raises(DomainError):
        eval_heat_kernel("legendre", 0.0, GRID, GRID)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.005, 3.0), c=st.floats(0.0, 4.0))
def test_sandwich_property(t, c):
    x = theta_grid(15)
    rep = verify_pswf_sandwich(c, [t], x)
    assert rep["passed"]
    assert ball_measure(0.0, math.sqrt(t)) > 0
