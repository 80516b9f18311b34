"""Littlewood-Paley (Besov and Triebel-Lizorkin) norms for L_0 and L_c.

Functions are finite coefficient sequences in the Legendre or prolate
basis.  Every dyadic block phi_j(sqrt L) f is a polynomial (for L_c up to
the Galerkin truncation), so L^p norms are computed exactly piecewise: the
theta-interval is split at the block's zeros and at the kinks of the
nonclassical weight, and each piece gets Gauss-Jacobi quadrature whose
endpoint exponents absorb |g|^p at zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureInsufficient
from .geometry import ball_measure, theta
from .heat import prolate_decomposition
from .orthopoly import LEGENDRE, basis_matrix, gauss_rule

__all__ = [
    "DistributionCoeffs",
    "DyadicWindowPair",
    "STANDARD_WINDOWS",
    "ALTERNATE_WINDOWS",
    "BesovParams",
    "smooth_step",
    "change_of_basis_matrix",
    "dyadic_block",
    "block_coefficients",
    "besov_norm",
    "tl_norm",
    "test_family",
    "equivalence_experiment",
    "window_independence",
    "maximal_peetre_check",
    "hardy_constant",
    "hardy_inequality_check",
]

QUAD_TOL = 1e-7
GAUSS_ORDER = 24
COEFF_TRIM = 1e-15


def _margin(c):
    return 20 + int(math.ceil(2 * c))


# -- windows ----------------------------------------------------------------

def _bump_primitive(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = u > 0
    out[m] = np.exp(-1.0 / u[m])
    return out


def smooth_step(lam, a, b):
    """C-infinity step: 1 on [0, a], 0 on [b, inf), strictly between on (a, b)."""
    lam = np.abs(np.asarray(lam, dtype=float))
    u = (b - lam) / (b - a)
    f1 = _bump_primitive(u)
    f2 = _bump_primitive(1 - u)
    return f1 / (f1 + f2)


@dataclass(frozen=True)
class DyadicWindowPair:
    """phi_0 = h, phi = h(lam) - h(2 lam) with h the smooth step on [a, b].

    The admissibility conditions (supp phi_0 in [0,2], supp phi in [1/2,2],
    lower bounds on [0, 2^(3/4)] and [2^(-3/4), 2^(3/4)]) hold exactly when
    1 <= a < 2^(1/4) and 2^(3/4) < b <= 2.  The dual windows Psi_j are
    phi_j / sum_m phi_m^2, so sum_j Psi_j phi_j = 1.
    """

    a: float = 1.0
    b: float = 2.0

    def __post_init__(self):
        if not (1.0 <= self.a < 2 ** 0.25 and 2 ** 0.75 < self.b <= 2.0):
            raise DomainError("window parameters violate admissibility", a=self.a, b=self.b)

    def h(self, lam):
        return smooth_step(lam, self.a, self.b)

    def phi0(self, lam):
        return self.h(lam)

    def phi(self, lam):
        return self.h(lam) - self.h(2 * np.asarray(lam, dtype=float))

    def phi_j(self, j, lam):
        lam = np.asarray(lam, dtype=float)
        return self.phi0(lam) if j == 0 else self.phi(lam / 2.0**j)

    def max_level(self, lam_max):
        """Largest j whose window can be nonzero at some lam <= lam_max."""
        if lam_max < self.a / 2:
            return 0
        return max(0, int(math.floor(math.log2(lam_max * 2 / self.a))) + 1)

    def psi_j(self, j, lam):
        lam = np.asarray(lam, dtype=float)
        J = self.max_level(float(np.max(lam, initial=0.0))) + 1
        S = sum(self.phi_j(m, lam) ** 2 for m in range(J + 1))
        return self.phi_j(j, lam) / S

    def lower_bounds(self, n=20001):
        """Sampled minima of |phi_0| on [0, 2^(3/4)] and |phi| on [2^(-3/4), 2^(3/4)]."""
        l0 = np.linspace(0, 2**0.75, n)
        l1 = np.linspace(2**-0.75, 2**0.75, n)
        return float(np.min(np.abs(self.phi0(l0)))), float(np.min(np.abs(self.phi(l1))))

    def to_dict(self):
        return {"a": self.a, "b": self.b}


STANDARD_WINDOWS = DyadicWindowPair(1.0, 2.0)
ALTERNATE_WINDOWS = DyadicWindowPair(1.1, 1.8)


# -- coefficient sequences --------------------------------------------------

@dataclass(frozen=True)
class DistributionCoeffs:
    """Finite coefficient sequence <f, basis_n> in the Legendre or prolate(c) basis."""

    basis: str
    coeffs: np.ndarray
    c: float = 0.0
    declared_decay: float | None = None

    def __post_init__(self):
        if self.basis not in ("legendre", "prolate"):
            raise DomainError(f"unknown basis {self.basis!r}")
        a = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if a.ndim != 1 or not np.all(np.isfinite(a)):
            raise DomainError("coefficients must be a finite 1-D sequence")
        object.__setattr__(self, "coeffs", a)
        if self.basis == "legendre":
            object.__setattr__(self, "c", 0.0)

    @property
    def support(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else -1

    def __mul__(self, s):
        return DistributionCoeffs(self.basis, self.coeffs * s, self.c, self.declared_decay)

    __rmul__ = __mul__

    def __add__(self, other):
        if (self.basis, self.c) != (other.basis, other.c):
            other = other.to_basis(self.basis, self.c)
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return DistributionCoeffs(self.basis, a, self.c)

    def to_basis(self, basis, c=0.0):
        """Re-expand in another basis via the quadrature Gram matrix <P_k, psi_n>."""
        if basis == "legendre":
            c = 0.0
        if basis == self.basis and float(c) == self.c:
            return self
        if self.basis == "legendre" and basis == "legendre":
            return self
        K = max(self.support, 0)
        if self.basis == "legendre":
            G = change_of_basis_matrix(float(c), K + _margin(c))
            a = G[:, : K + 1] @ self.coeffs[: K + 1]
            return DistributionCoeffs("prolate", _trim(a), float(c))
        G = change_of_basis_matrix(self.c, K)
        leg = self.coeffs[: K + 1] @ G
        out = DistributionCoeffs("legendre", _trim(leg))
        return out if basis == "legendre" else out.to_basis("prolate", c)

    def legendre_series(self):
        """Normalized Legendre coefficients of f (exact for the prolate truncation)."""
        if self.basis == "legendre":
            return self.coeffs.copy()
        K = max(self.support, 0)
        dec = prolate_decomposition(self.c, K)
        return self.coeffs[: K + 1] @ dec.coeffs

    def __call__(self, x):
        leg = self.legendre_series()
        return leg @ basis_matrix(LEGENDRE, len(leg) - 1, np.asarray(x, dtype=float))


def _trim(a, rel=1e-17):
    a = np.asarray(a, dtype=float)
    big = np.abs(a) > rel * max(np.max(np.abs(a), initial=0.0), 1e-300)
    nz = np.flatnonzero(big)
    return a[: nz[-1] + 1] if nz.size else a[:1] * 0


def change_of_basis_matrix(c, n_max, order=None):
    """G[n, k] = <psi_n, P_k> by Gauss-Legendre quadrature, n <= n_max, k <= Galerkin N."""
    dec = prolate_decomposition(float(c), int(n_max))
    N = dec.N
    rule = gauss_rule(LEGENDRE, order or (N + 16))
    B = basis_matrix(LEGENDRE, N, rule.nodes)
    psi = dec.coeffs @ B
    return (psi * rule.weights) @ B.T


# -- blocks -----------------------------------------------------------------

def _spectral_view(f: DistributionCoeffs, kind, c):
    """Coefficients in the operator's eigenbasis, its eigenvalues and the Legendre synthesis matrix."""
    if kind == "legendre":
        a = f.to_basis("legendre").coeffs
        n = np.arange(len(a))
        return a, np.sqrt(n * (n + 1.0)), None
    if kind != "prolate":
        raise DomainError(f"unknown operator kind {kind!r}")
    g = f.to_basis("prolate", c)
    a = g.coeffs
    dec = prolate_decomposition(float(c), max(len(a) - 1, 0))
    return a, np.sqrt(dec.chis[: len(a)]), dec.coeffs[: len(a)]


def block_coefficients(f: DistributionCoeffs, kind="legendre", c=0.0, windows=STANDARD_WINDOWS, dual=False):
    """Normalized Legendre coefficients of every nonzero block phi_j(sqrt L) f, j = 0..J."""
    a, lam, synth = _spectral_view(f, kind, c)
    J = windows.max_level(float(np.max(lam, initial=0.0)))
    out = []
    for j in range(J + 1):
        w = windows.psi_j(j, lam) if dual else windows.phi_j(j, lam)
        b = w * a
        out.append(b if synth is None else b @ synth)
    return out


def dyadic_block(f: DistributionCoeffs, j, x, kind="legendre", c=0.0, windows=STANDARD_WINDOWS):
    """phi_j(sqrt L) f on the points x."""
    if j < 0 or int(j) != j:
        raise DomainError("j must be a nonnegative integer")
    blocks = block_coefficients(f, kind, c, windows)
    x = np.asarray(x, dtype=float)
    if j >= len(blocks):
        return np.zeros_like(x)
    b = blocks[j]
    return b @ basis_matrix(LEGENDRE, len(b) - 1, x)


def _classical(b):
    """Normalized -> classical Legendre coefficients (P_k = sqrt(k+1/2) normalized)."""
    k = np.arange(len(b))
    return b * np.sqrt(k + 0.5)


def _roots_theta(cl):
    """theta-locations of the real zeros of a classical Legendre series in (-1, 1)."""
    cl = _trim(cl, COEFF_TRIM)
    if len(cl) < 2:
        return np.empty(0)
    r = npleg.legroots(cl)
    r = r[np.abs(np.imag(r)) < 1e-7].real if np.iscomplexobj(r) else r
    r = r[(r > -1) & (r < 1)]
    if r.size == 0:
        return np.empty(0)
    # two Newton polishing steps
    d = npleg.legder(cl)
    for _ in range(2):
        dv = npleg.legval(r, d)
        ok = dv != 0
        r[ok] -= npleg.legval(r[ok], cl) / dv[ok]
    r = np.clip(r, -1, 1)
    return np.sort(theta(r))


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float
    q: float
    flavor: str = "classical"
    kind: str = "legendre"
    c: float = 0.0

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise DomainError("p and q must be positive", p=self.p, q=self.q)
        if self.flavor not in ("classical", "nonclassical"):
            raise DomainError(f"unknown flavor {self.flavor!r}")
        if self.kind not in ("legendre", "prolate"):
            raise DomainError(f"unknown operator kind {self.kind!r}")

    def with_kind(self, kind, c=None):
        return BesovParams(self.s, self.p, self.q, self.flavor, kind, self.c if c is None else c)

    def to_dict(self):
        return {"s": self.s, "p": _enc(self.p), "q": _enc(self.q), "flavor": self.flavor, "kind": self.kind, "c": self.c}


def _enc(v):
    return "inf" if math.isinf(v) else v


def _weight(params, j, x):
    """Per-level factor: 2^(s j) or V(x, 2^-j)^(-s/2)."""
    if params.flavor == "classical":
        return 2.0 ** (params.s * j) * np.ones_like(x)
    return ball_measure(x, 2.0**-j) ** (-params.s / 2)


def _weight_breaks(params, levels):
    if params.flavor == "classical":
        return []
    out = []
    for j in levels:
        r = 2.0**-j
        if r < np.pi / 2:
            out += [r, np.pi - r]
    return out


def _sidi_integral(func, breaks, m):
    """int_0^pi F(theta) sin(theta) dtheta with the sin^2 sigmoidal map on each piece.

    The map t = a + (b-a)(u - sin(2 pi u)/(2 pi)) flattens algebraic
    endpoint singularities (kinks |t - r|^q of single blocks inside an
    l^q sum), which plain Gauss-Legendre would resolve only slowly.
    """
    g, w = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (g + 1)
    w = 0.5 * w
    phi = u - np.sin(2 * np.pi * u) / (2 * np.pi)
    dphi = 1 - np.cos(2 * np.pi * u)
    a = np.asarray(breaks[:-1])
    b = np.asarray(breaks[1:])
    keep = b > a
    a, b = a[keep], b[keep]
    t = (a[:, None] + (b - a)[:, None] * phi[None, :]).ravel()
    ww = ((b - a)[:, None] * (w * dphi)[None, :]).ravel()
    return float(np.sum(ww * func(t) * np.sin(t)))


def _piecewise_integral(func_sq, breaks, zero_flags, p, m):
    """int_0^pi F(theta) sin(theta) dtheta where F ~ |theta - z|^p at flagged breakpoints.

    ``func_sq(theta)`` returns F on an array.  Gauss-Jacobi exponents are p
    at flagged (zero) endpoints and 0 elsewhere; F is divided by the
    Jacobi weight before summation so the remaining factor is smooth.
    """
    cache = {}
    nodes, weights, divisors = [], [], []
    for i in range(len(breaks) - 1):
        a, b = breaks[i], breaks[i + 1]
        if not b > a:
            continue
        al = p if zero_flags[i + 1] else 0.0
        be = p if zero_flags[i] else 0.0
        if (al, be) not in cache:
            cache[(al, be)] = roots_jacobi(m, al, be)
        u, w = cache[(al, be)]
        half = 0.5 * (b - a)
        t = 0.5 * (a + b) + half * u
        div = (1 - u) ** al * (1 + u) ** be
        nodes.append(t)
        weights.append(w * half)
        divisors.append(div)
    if not nodes:
        return 0.0
    t = np.concatenate(nodes)
    w = np.concatenate(weights)
    div = np.concatenate(divisors)
    vals = func_sq(t) * np.sin(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(div > 0, vals / div, 0.0)
    return float(np.sum(w * integrand))


def _sup_grid(blocks_cl):
    deg = max(len(b) for b in blocks_cl)
    return np.linspace(0.0, np.pi, 32 * (deg + 1) + 1)


def _dedupe(points, tol=1e-13):
    points = np.sort(np.asarray(points, dtype=float))
    if points.size == 0:
        return points
    keep = np.concatenate(([True], np.diff(points) > tol))
    return points[keep]


def _lp_of_block(cl, weight_fn, p, extra_breaks, m):
    """(int |w g|^p dx)^(1/p) for one block given in classical Legendre coefficients."""
    if not np.any(cl):
        return 0.0
    if math.isinf(p):
        th = _sup_grid([cl])
        return float(np.max(np.abs(weight_fn(np.cos(th)) * npleg.legval(np.cos(th), cl))))
    z = _roots_theta(cl)
    brk = _dedupe(np.concatenate(([0.0, np.pi], z, extra_breaks)))
    zset = set(np.round(z, 12).tolist())
    flags = [round(float(b), 12) in zset for b in brk]

    def F(th):
        x = np.cos(th)
        return np.abs(weight_fn(x) * npleg.legval(x, cl)) ** p

    return _piecewise_integral(F, brk, flags, p, m) ** (1.0 / p)


def _lq(values, q):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(np.max(values))
    return float(np.sum(values**q) ** (1.0 / q))


def _with_refinement(compute, what):
    lo = compute(GAUSS_ORDER)
    hi = compute(2 * GAUSS_ORDER)
    scale = max(abs(hi), 1e-300)
    if abs(hi - lo) > QUAD_TOL * scale and hi != 0:
        raise QuadratureInsufficient(f"{what} changed under quadrature doubling", low=lo, high=hi)
    return hi


def besov_norm(f: DistributionCoeffs, params: BesovParams, windows=STANDARD_WINDOWS):
    """(sum_j (||w_j phi_j(sqrt L) f||_p)^q)^(1/q) with w_j = 2^(s j) or V(., 2^-j)^(-s/2)."""
    blocks = [_classical(b) for b in block_coefficients(f, params.kind, params.c, windows)]
    def compute(m):
        norms = []
        for j, cl in enumerate(blocks):
            extra = [] if params.flavor == "classical" else _weight_breaks(params, [j])
            wf = lambda x, j=j: _weight(params, j, x)  # noqa: E731
            norms.append(_lp_of_block(cl, wf, params.p, extra, m))
        return _lq(norms, params.q)

    return _with_refinement(compute, "Besov norm")


def tl_norm(f: DistributionCoeffs, params: BesovParams, windows=STANDARD_WINDOWS):
    """|| (sum_j |w_j phi_j(sqrt L) f|^q)^(1/q) ||_p, p < inf."""
    if math.isinf(params.p):
        raise DomainError("Triebel-Lizorkin norms need p < inf")
    blocks = [_classical(b) for b in block_coefficients(f, params.kind, params.c, windows)]
    p, q = params.p, params.q
    zeros = [_roots_theta(b) for b in blocks]
    brk = list(np.concatenate([[0.0, np.pi]] + zeros)) + _weight_breaks(params, range(len(blocks)))

    def G(th):
        x = np.cos(th)
        vals = np.array([np.abs(_weight(params, j, x) * npleg.legval(x, b)) for j, b in enumerate(blocks)])
        if math.isinf(q):
            return np.max(vals, axis=0)
        return np.sum(vals**q, axis=0) ** (1.0 / q)

    if math.isinf(q):
        brk += _argmax_switches(G, blocks, params)
    brk = _dedupe(brk)

    def compute(m):
        return _sidi_integral(lambda th: G(th) ** p, brk, m) ** (1.0 / p)

    if not blocks or all(not np.any(b) for b in blocks):
        return 0.0
    return _with_refinement(compute, "Triebel-Lizorkin norm")


def _argmax_switches(G, blocks, params):
    """theta where the level attaining the pointwise max may change (for q = inf).

    With constant (classical) weights these are among the zeros of
    w_i b_i +- w_k b_k for pairs of levels, found exactly; otherwise they
    are bracketed on a dense grid and refined with brentq.
    """
    if params.flavor == "classical":
        out = []
        w = [2.0 ** (params.s * j) for j in range(len(blocks))]
        for i in range(len(blocks)):
            for k in range(i + 1, len(blocks)):
                if not (np.any(blocks[i]) and np.any(blocks[k])):
                    continue
                n = max(len(blocks[i]), len(blocks[k]))
                bi = np.pad(blocks[i], (0, n - len(blocks[i]))) * w[i]
                bk = np.pad(blocks[k], (0, n - len(blocks[k]))) * w[k]
                out += list(_roots_theta(bi - bk)) + list(_roots_theta(bi + bk))
        return out
    th = _sup_grid(blocks)
    x = np.cos(th)
    vals = np.array([np.abs(_weight(params, j, x) * npleg.legval(x, b)) for j, b in enumerate(blocks)])
    arg = np.argmax(vals, axis=0)
    out = []
    for i in np.flatnonzero(arg[1:] != arg[:-1]):
        j1, j2 = arg[i], arg[i + 1]

        def diff(t, j1=j1, j2=j2):
            xx = np.cos(t)
            return (abs(_weight(params, j1, np.array([xx]))[0] * npleg.legval(xx, blocks[j1]))
                    - abs(_weight(params, j2, np.array([xx]))[0] * npleg.legval(xx, blocks[j2])))

        a, b = th[i], th[i + 1]
        if diff(a) * diff(b) < 0:
            out.append(brentq(diff, a, b, xtol=1e-15))
        else:
            out.append(0.5 * (a + b))
    return out


# -- experiments ------------------------------------------------------------

def test_family(support, seed=0, c=1.0):
    """Single Legendre elements, single prolate elements, random and lacunary combinations."""
    rng = np.random.default_rng(seed)
    K = int(support)
    fam = []
    for n in sorted({0, 1, 2, 3, 5, 8, K // 4, K // 2, K}):
        a = np.zeros(n + 1)
        a[n] = 1.0
        fam.append(("legendre_single", n, DistributionCoeffs("legendre", a)))
    for n in sorted({0, 1, 2, 4, K // 2, K}):
        a = np.zeros(n + 1)
        a[n] = 1.0
        fam.append(("prolate_single", n, DistributionCoeffs("prolate", a, c)))
    for r in range(3):
        k = np.arange(K + 1)
        a = rng.standard_normal(K + 1) / (1.0 + k) ** rng.uniform(0.0, 1.5)
        fam.append(("random", r, DistributionCoeffs("legendre", a)))
    idx = [2**i for i in range(int(math.log2(K)) + 1)]
    for sign in (1.0, -1.0):
        a = np.zeros(K + 1)
        a[idx] = sign ** np.arange(len(idx))
        fam.append(("lacunary", int(sign), DistributionCoeffs("legendre", a)))
    return fam


def equivalence_experiment(params: BesovParams, c, supports=(32, 64, 128), space="besov",
                           windows=STANDARD_WINDOWS, seed=0):
    """Ratios ||f||_{L_0} / ||f||_{L_c} over the test family, per spectral support size."""
    norm = besov_norm if space == "besov" else tl_norm
    p0 = params.with_kind("legendre", 0.0)
    pc = params.with_kind("prolate", c)
    rows = []
    for K in supports:
        ratios = []
        for label, idx, f in test_family(K, seed, c if c > 0 else 1.0):
            if c == 0 and f.basis == "prolate":
                f = DistributionCoeffs("prolate", f.coeffs, 0.0)
            n0 = norm(f, p0, windows)
            nc = norm(f, pc, windows)
            ratios.append(n0 / nc)
        rows.append({"support": int(K), "min_ratio": float(min(ratios)), "max_ratio": float(max(ratios)),
                     "n_functions": len(ratios)})
    first, last = rows[0], rows[-1]
    drift = max(abs(last["max_ratio"] / first["max_ratio"] - 1), abs(last["min_ratio"] / first["min_ratio"] - 1))
    window_C = max(max(r["max_ratio"] for r in rows), 1 / min(r["min_ratio"] for r in rows))
    return {"params": params.to_dict(), "c": float(c), "space": space, "rows": rows, "drift": drift, "C": window_C}


def window_independence(params: BesovParams, support=32, c=1.0, pair=(STANDARD_WINDOWS, ALTERNATE_WINDOWS), seed=0):
    """Extremal ratios of the norm computed with two admissible window pairs."""
    ratios = [besov_norm(f, params, pair[0]) / besov_norm(f, params, pair[1])
              for _, _, f in test_family(support, seed, c if c > 0 else 1.0)]
    return {"min_ratio": float(min(ratios)), "max_ratio": float(max(ratios))}


def _maximal_function(g_abs_t, th, idx):
    """M_t-type averages sup_r (1/V(x,r)) int_B |g|^t for x = cos(th[idx]), radii on the grid."""
    # cumulative int_0^theta |g|^t sin
    from scipy.integrate import cumulative_trapezoid

    cum = cumulative_trapezoid(g_abs_t * np.sin(th), th, initial=0.0)
    h = th[1] - th[0]
    M = len(th)
    out = np.empty(len(idx))
    ks = np.arange(1, M)
    for n, i in enumerate(idx):
        lo = np.clip(i - ks, 0, M - 1)
        hi = np.clip(i + ks, 0, M - 1)
        mass = cum[hi] - cum[lo]
        vol = ball_measure(np.cos(th[i]), ks * h)
        out[n] = float(np.max(mass / vol))
    return out


def maximal_peetre_check(g: DistributionCoeffs, N, t, n_theta=4001, stride=20):
    """Outer-fitted c in sup_y |g(y)| / (1 + N rho(x,y))^(2/t) <= c M_t g(x).

    M_t is the uncentered-radius ball average of |g|^t (power 1/t), with
    integrals from a fine theta grid; the supremum over r runs over grid radii.
    """
    th = np.linspace(0.0, np.pi, n_theta)
    gv = np.abs(g(np.cos(th)))
    idx = np.arange(0, n_theta, stride)
    if idx[-1] != n_theta - 1:
        idx = np.append(idx, n_theta - 1)
    Mt = _maximal_function(gv**t, th, idx) ** (1.0 / t)
    lhs = np.array([np.max(gv / (1 + N * np.abs(th - th[i])) ** (2.0 / t)) for i in idx])
    ok = Mt > 1e-14 * np.max(Mt)
    ratio = lhs[ok] / Mt[ok]
    return {"N": int(N), "t": float(t), "c": float(np.max(ratio)), "min_ratio": float(np.min(ratio)),
            "n_points": int(ok.sum())}


def hardy_constant(beta, q):
    r = 1.0 if math.isinf(q) else min(1.0, q)
    return (1.0 / (1.0 - 2.0 ** (-beta * r))) ** (1.0 / r)


def hardy_inequality_check(a, beta, q):
    """Both discrete Hardy inequalities with c = (1 - 2^(-beta min(1,q)))^(-1/min(1,q))."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0) or not beta > 0 or not q > 0:
        raise DomainError("need a >= 0, beta > 0, q > 0")
    L = len(a)
    # the first inequality has nonzero terms for every j; extend until negligible
    extra = int(math.ceil(60.0 / beta)) + 1
    J = L + extra
    m = np.arange(L)
    j = np.arange(J)[:, None]
    w1 = np.where(m[None, :] <= j, 2.0 ** (-beta * (j - m[None, :])), 0.0)
    s1 = w1 @ a
    j2 = np.arange(L)[:, None]
    w2 = np.where(m[None, :] >= j2, 2.0 ** (-beta * (m[None, :] - j2)), 0.0)
    s2 = w2 @ a
    c = hardy_constant(beta, q)
    rhs = c * _lq(a, q)
    lhs1, lhs2 = _lq(s1, q), _lq(s2, q)
    return {"lhs1": lhs1, "lhs2": lhs2, "rhs": rhs, "c": c,
            "holds": bool(lhs1 <= rhs * (1 + 1e-12) and lhs2 <= rhs * (1 + 1e-12))}
