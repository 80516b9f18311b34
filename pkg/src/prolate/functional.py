"""Spectral multiplier kernels K_{F(delta sqrt L)} and their localization checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationInsufficient
from .geometry import ball_measure, theta, theta_grid
from .heat import EPS, KernelGrid, legendre_decomposition, lipschitz_fit, prolate_decomposition, sup_norm_bound
from .orthopoly import basis_matrix, basis_matrix_with_derivative

__all__ = [
    "MultiplierProfile",
    "MultiplierKernelGrid",
    "multiplier_terms_needed",
    "multiplier_tail_bound",
    "eval_multiplier_kernel",
    "localization_constant",
    "verify_multiplier_localization",
    "verify_rough_bound",
    "verify_finite_speed",
    "verify_derivative_bounds",
    "verify_kernel_lipschitz",
]

MULTIPLIER_TAIL_TOL = 1e-14
MAX_TERMS = 4000


def _sinc(z):
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.sin(z[nz]) / z[nz]
    return out


@dataclass(frozen=True)
class MultiplierProfile:
    """Even real multiplier F.

    kinds:
        ``gaussian``      F = exp(-lam^2)
        ``bump``          F = exp(1 - 1/(1 - (lam/R)^2)) on |lam| < R, else 0
        ``fejer``         F = (sin(A lam/2) / (A lam/2))^2, Fourier transform
                          is the triangle on [-A, A]
        ``band_limited``  F = (sin(A lam/p) / (A lam/p))^p, Fourier transform
                          supported in [-A, A] and of class W^{p-1}_1
        ``indicator``     F = 1 on |lam| <= tau, else 0
        ``poly``          F = lam^(2k) * base(lam)
        ``product``       F = base(lam) * other(lam)
    """

    kind: str
    A: float = 1.0
    R: float = 1.0
    p: int = 2
    tau: float = 1.0
    k: int = 0
    base: "MultiplierProfile | None" = None
    other: "MultiplierProfile | None" = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump", "fejer", "band_limited", "indicator", "poly", "product"):
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if self.kind in ("fejer", "band_limited") and not self.A > 0:
            raise DomainError("A must be positive")
        if self.kind == "bump" and not self.R > 0:
            raise DomainError("R must be positive")
        if self.kind == "band_limited" and (int(self.p) != self.p or self.p < 1):
            raise DomainError("p must be a positive integer")
        if self.kind in ("poly", "product") and self.base is None:
            raise DomainError("composite profile needs a base")

    # constructors
    @classmethod
    def gaussian(cls):
        return cls("gaussian")

    @classmethod
    def bump(cls, R=2.0):
        return cls("bump", R=float(R))

    @classmethod
    def fejer(cls, A):
        return cls("fejer", A=float(A), p=2)

    @classmethod
    def band_limited(cls, A, p=4):
        return cls("band_limited", A=float(A), p=int(p))

    @classmethod
    def indicator(cls, tau):
        return cls("indicator", tau=float(tau))

    @classmethod
    def poly(cls, k, base):
        return cls("poly", k=int(k), base=base)

    def __mul__(self, other):
        return MultiplierProfile("product", base=self, other=other)

    @property
    def support_radius(self):
        """Half-width of supp F^ when F is band-limited, else None."""
        if self.kind in ("fejer", "band_limited"):
            return self.A
        return None

    def __call__(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.kind == "gaussian":
            return np.exp(-lam * lam)
        if self.kind == "bump":
            u = lam / self.R
            out = np.zeros_like(u)
            m = u < 1
            out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
            return out
        if self.kind == "fejer":
            return _sinc(self.A * lam / 2) ** 2
        if self.kind == "band_limited":
            return _sinc(self.A * lam / self.p) ** self.p
        if self.kind == "indicator":
            return (lam <= self.tau).astype(float)
        if self.kind == "poly":
            return lam ** (2 * self.k) * self.base(lam)
        return self.base(lam) * self.other(lam)

    def envelope(self, lam):
        """Nonincreasing bound on sup_{mu >= lam} |F(mu)|."""
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.kind in ("gaussian", "bump", "indicator"):
            return self(lam)
        if self.kind in ("fejer", "band_limited"):
            p = self.p
            with np.errstate(divide="ignore"):
                return np.minimum(1.0, (p / (self.A * lam)) ** p)
        if self.kind == "product":
            return self.base.envelope(lam) * self.other.envelope(lam)
        # poly: lam^(2k) base(lam); search the running max on a grid beyond lam
        out = np.empty_like(lam)
        for i, v in np.ndenumerate(lam):
            mu = v + np.linspace(0.0, 60.0, 6001)
            out[i] = float(np.max(np.abs(mu ** (2 * self.k) * self.base.envelope(mu))))
        return out

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind in ("fejer", "band_limited"):
            d.update(A=self.A, p=self.p)
        if self.kind == "bump":
            d["R"] = self.R
        if self.kind == "indicator":
            d["tau"] = self.tau
        if self.kind == "poly":
            d.update(k=self.k, base=self.base.to_dict())
        if self.kind == "product":
            d.update(base=self.base.to_dict(), other=self.other.to_dict())
        return d


@dataclass(frozen=True)
class MultiplierKernelGrid(KernelGrid):
    profile: MultiplierProfile | None = None
    derivative: str | None = None

    @property
    def delta(self):
        return self.t


def _sup_factor(n, c, derivative):
    s = sup_norm_bound(n, c)
    if derivative is None:
        return s
    n = np.asarray(n, dtype=float)
    if derivative == "D":
        # Bernstein-type bound for sqrt(1-x^2) d/dx of a degree ~n function
        return (n + 1 + c * c) * s
    if derivative == "L":
        return (n * (n + 1) + 2 * c * c) * s
    raise DomainError(f"unknown derivative {derivative!r}")


def multiplier_terms_needed(profile, delta, cap=MAX_TERMS):
    """Smallest N with env(delta sqrt(N(N+1))) (N+1)^3 < 1e-14, or TruncationInsufficient."""
    n = np.arange(cap + 1, dtype=float)
    crit = profile.envelope(delta * np.sqrt(n * (n + 1))) * (n + 1) ** 3
    ok = np.flatnonzero(crit < MULTIPLIER_TAIL_TOL)
    if ok.size == 0:
        raise TruncationInsufficient(
            "multiplier decays too slowly for the tail rule", profile=profile.kind, delta=delta, cap=cap
        )
    return int(ok[0])


def multiplier_tail_bound(profile, delta, N, c, derivative=None, chunk=4096, max_terms=10**7):
    """Certified bound on sum_{n>N} env(delta sqrt(n(n+1))) S_n(x) S_n(y).

    S_n bounds sup|psi_n| (times the derivative factor if requested).
    Returns inf when the series of bounds does not converge fast enough
    to be summed (for instance the Fejer profile, whose terms decay like 1/n).
    """
    total = 0.0
    start = N + 1
    while start < max_terms:
        n = np.arange(start, start + chunk, dtype=float)
        terms = profile.envelope(delta * np.sqrt(n * (n + 1))) * _sup_factor(n, c, derivative) * sup_norm_bound(n, c)
        total += float(terms.sum())
        last = float(terms[-1])
        if last == 0.0:
            return total
        # power-law closing bound: if terms ~ n^-q with q > 1, remainder <= last * n / (q - 1)
        q = -math.log(terms[-1] / terms[-chunk // 2]) / math.log(n[-1] / n[-chunk // 2])
        if q > 1.5:
            return total + last * n[-1] / (q - 1)
        start += chunk
        chunk *= 2
    return math.inf


def _decomposition(kind, c, n_terms, decomposition):
    if decomposition is not None:
        if len(decomposition.chis) < n_terms + 1:
            raise TruncationInsufficient("decomposition too short", have=len(decomposition.chis) - 1, need=n_terms)
        return decomposition
    if kind == "legendre":
        return legendre_decomposition(n_terms)
    if kind == "prolate":
        return prolate_decomposition(float(c), n_terms)
    raise DomainError(f"unknown operator kind {kind!r}")


def eval_multiplier_kernel(profile, delta, kind, x_nodes, y_nodes, c=0.0, decomposition=None,
                           n_terms=None, derivative=None):
    """K_{F(delta sqrt L)}(x, y) by truncated eigen-series.

    Args:
        profile: MultiplierProfile.
        delta: scale > 0.
        kind: ``"legendre"`` (L_0) or ``"prolate"`` (L_c).
        n_terms: explicit last index; default is the tail rule, which
            raises TruncationInsufficient for slowly decaying profiles.
        derivative: None, ``"D"`` for sqrt(1-x^2) d/dx in x, or ``"L"`` for
            L_0 applied in x.  Both act on the Legendre coefficients
            (exactly, no finite differences).

    Returns:
        MultiplierKernelGrid.
    """
    if not delta > 0:
        raise DomainError("delta must be positive", delta=delta)
    if kind == "legendre":
        c = 0.0
    N = multiplier_terms_needed(profile, delta) if n_terms is None else int(n_terms)
    dec = _decomposition(kind, c, N, decomposition)
    c = dec.c
    w = profile(delta * np.sqrt(dec.chis[: N + 1]))
    x = np.asarray(x_nodes, dtype=float)
    y = np.asarray(y_nodes, dtype=float)
    C = dec.coeffs[: N + 1]
    By = basis_matrix(dec.basis, dec.N, y.ravel())
    Py = C @ By
    if derivative is None:
        Px = C @ basis_matrix(dec.basis, dec.N, x.ravel())
    elif derivative == "D":
        _, Dx = basis_matrix_with_derivative(dec.basis, dec.N, x.ravel())
        Px = (C @ Dx) * np.sqrt((1 - x.ravel()) * (1 + x.ravel()))
    elif derivative == "L":
        k = np.arange(dec.N + 1)
        Px = (C * (k * (k + 1.0))) @ basis_matrix(dec.basis, dec.N, x.ravel())
    else:
        raise DomainError(f"unknown derivative {derivative!r}")
    vals = Px.T @ (w[:, None] * Py)
    absum = np.abs(Px).T @ (np.abs(w)[:, None] * np.abs(Py))
    tail = multiplier_tail_bound(profile, delta, N, c, derivative)
    rnd = (4 * N + 32) * EPS * absum
    return MultiplierKernelGrid(x, y, float(delta), vals, tail, rnd, kind, float(c), N + 1, "delta", profile, derivative)


# -- fits -----------------------------------------------------------------

def _geometry(x, delta):
    th = theta(x)
    rho = np.abs(np.subtract.outer(th, th))
    V = ball_measure(x, delta)
    return th, rho, np.sqrt(np.outer(V, V))


def _noise(K):
    return np.maximum(1e3 * K.error_bound, 1e-13 * np.max(np.abs(K.values)))


def localization_constant(K, sigma, power=0):
    """max |K| delta^power (1 + rho/delta)^sigma sqrt(V(x,delta) V(y,delta)) above noise."""
    delta = K.t
    _, rho, sv = _geometry(K.x, delta)
    mask = np.abs(K.values) > _noise(K)
    val = np.abs(K.values) * delta**power * (1 + rho / delta) ** sigma * sv
    return float(np.max(val[mask])) if np.any(mask) else 0.0


def verify_multiplier_localization(profile, deltas, sigmas, kind="prolate", c=1.0, n_grid=81, refine=True):
    """Outer-fitted c_sigma per (delta, sigma), and the drift under 2x grid refinement."""
    rows = []
    for delta in deltas:
        grids = (n_grid, 2 * n_grid - 1) if refine else (n_grid,)
        Ks = [eval_multiplier_kernel(profile, delta, kind, theta_grid(n), theta_grid(n), c) for n in grids]
        for s in sigmas:
            vals = [localization_constant(K, s) for K in Ks]
            drift = abs(vals[-1] / vals[0] - 1) if len(vals) > 1 else 0.0
            rows.append({"delta": float(delta), "sigma": s, "c_sigma": vals[0], "c_sigma_refined": vals[-1], "drift": drift})
    return {"profile": profile.to_dict(), "kind": kind, "c": float(c), "rows": rows,
            "max_drift": max(r["drift"] for r in rows)}


def verify_rough_bound(taus, kind="prolate", c=1.0, n_grid=81):
    """C in |K_{1[0,tau]}(x,y)| <= C / sqrt(V(x,1/tau) V(y,1/tau)) for each tau."""
    x = theta_grid(n_grid)
    rows = []
    for tau in taus:
        prof = MultiplierProfile.indicator(tau)
        K = eval_multiplier_kernel(prof, 1.0, kind, x, x, c)
        _, _, sv = _geometry(x, 1.0 / tau)
        rows.append({"tau": float(tau), "C": float(np.max(np.abs(K.values) * sv)), "n_terms": K.n_terms})
    Cs = [r["C"] for r in rows]
    return {"kind": kind, "c": float(c), "rows": rows, "spread": max(Cs) / min(Cs)}


def verify_finite_speed(profile, delta, kind="prolate", c=1.0, n_grid=241, n_terms=None, band=0.1):
    """Decay of K_{F(delta sqrt L)} beyond rho = delta A for band-limited F.

    Passes when max|K| over rho > delta A (1 + 1e-6) is at most
    max(certified tail, 1e-3 max|K| over rho <= delta A).  An infinite
    (uncertifiable) tail leaves only the relative clause.
    """
    A = profile.support_radius
    if A is None:
        raise DomainError("finite speed needs a band-limited profile")
    x = theta_grid(n_grid)
    K = eval_multiplier_kernel(profile, delta, kind, x, x, c, n_terms=n_terms)
    _, rho, _ = _geometry(x, delta)
    front = delta * A
    inside = float(np.max(np.abs(K.values[rho <= front])))
    outside_mask = rho > front * (1 + 1e-6)
    outside = float(np.max(np.abs(K.values[outside_mask]))) if np.any(outside_mask) else 0.0
    band_mask = outside_mask & (rho <= front + band)
    band_max = float(np.max(np.abs(K.values[band_mask]))) if np.any(band_mask) else 0.0
    tail = K.series_tail_bound
    allowed = max(tail if math.isfinite(tail) else 0.0, 1e-3 * inside)
    # decay profile across the frontier, in bins of rho
    edges = np.linspace(0, np.pi, 25)
    prof = []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (rho >= a) & (rho < b)
        if np.any(m):
            prof.append([float(a), float(b), float(np.max(np.abs(K.values[m])))])
    return {
        "profile": profile.to_dict(), "kind": kind, "c": float(c), "delta": float(delta), "A": float(A),
        "n_terms": K.n_terms, "max_inside": inside, "max_outside": outside, "max_band": band_max,
        "certified_tail": tail if math.isfinite(tail) else None, "allowed": allowed,
        "passed": outside <= allowed, "decay_profile": prof,
    }


def verify_derivative_bounds(profile, deltas, sigma, kind="prolate", c=1.0, n_grid=81):
    """Fitted constants for |D_x K| delta and |L_{0,x} K| delta^2 against the localization envelope."""
    x = theta_grid(n_grid)
    rows = []
    for delta in deltas:
        KD = eval_multiplier_kernel(profile, delta, kind, x, x, c, derivative="D")
        KL = eval_multiplier_kernel(profile, delta, kind, x, x, c, derivative="L")
        rows.append({
            "delta": float(delta),
            "c_D": localization_constant(KD, sigma, power=1),
            "c_L": localization_constant(KL, sigma, power=2),
        })
    ratios = []
    for a, b in zip(rows[:-1], rows[1:]):
        ratios.append({"delta_pair": [a["delta"], b["delta"]],
                       "D_ratio": b["c_D"] / a["c_D"], "L_ratio": b["c_L"] / a["c_L"]})
    return {"profile": profile.to_dict(), "kind": kind, "c": float(c), "sigma": sigma, "rows": rows, "ratios": ratios}


def verify_kernel_lipschitz(profile, delta, sigma, kind="prolate", c=1.0, n_grid=81):
    """C in |K(x,y) - K(x',y)| <= C (rho(x,x')/delta) (1+rho(x,y)/delta)^-sigma / sqrt(V V), rho(x,x') <= delta."""
    x = theta_grid(n_grid)
    th, rho, sv = _geometry(x, delta)
    K = eval_multiplier_kernel(profile, delta, kind, x, x, c)
    env = (1 + rho / delta) ** (-sigma) / sv
    C = lipschitz_fit(K.values, th, delta, env, _noise(K))
    return {"profile": profile.to_dict(), "kind": kind, "c": float(c), "delta": float(delta), "sigma": sigma,
            "n_grid": int(n_grid), "C": C}
