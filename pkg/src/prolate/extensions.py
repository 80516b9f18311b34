"""Weighted generalizations: Jacobi operator plus potential, and ball PSWFs.

Jacobi case: L_V = L + V on L^2((1-x)^a (1+x)^b dx), L the Jacobi operator
with eigenvalues n(n+a+b+1) on orthonormal Jacobi polynomials.  Galerkin
matrices are diag(lambda) + <V p_n, p_k>.

Ball case: for spherical-harmonic degree n the radial part of a ball PSWF
is phi(2|x|^2 - 1) with phi expanded in Jacobi polynomials of parameters
(gamma - 1/2, n + d/2 - 1).  There the unperturbed operator is diagonal with
eigenvalues lambda_{n+2k} = (n+2k)(n+2k+d+2 gamma-1) and c^2 |x|^2 =
c^2 (1+u)/2 is (c^2/2)(I + J), J the Jacobi (three-term recurrence) matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import (
    DimensionUnsupported,
    DomainError,
    InterlacingViolation,
    PotentialNegative,
    SandwichViolation,
    TruncationInsufficient,
)
from .geometry import ball_metric, ball_volume_weighted, jacobi_ball_surrogate, theta, theta_grid
from .heat import EPS, envelope_constants
from .orthopoly import BasisSpec, basis_matrix, gauss_rule, recurrence, weight_mass
from .pswf import SpectralDecomposition

__all__ = [
    "Potential",
    "JacobiPerturbationProblem",
    "potential_matrix",
    "solve_jacobi_perturbed",
    "jacobi_decomposition",
    "verify_interlacing",
    "jacobi_heat_kernel",
    "jacobi_heat_sandwich",
    "markov_defect",
    "BallProblem",
    "BallTable",
    "ball_eigenvalues",
    "verify_ball_brackets",
    "harmonic_dimension",
    "sphere_area",
    "ball_radial_kernel",
    "ball_sandwich_diagonal",
]

TAIL_TOL = 1e-10
BRACKET_SLACK = 1e-9
HEAT_TOL = 1e-16


# -- potentials -------------------------------------------------------------

@dataclass(frozen=True)
class Potential:
    """Nonnegative potential on [-1, 1].

    kinds: ``constant`` (value), ``polynomial`` (ascending monomial
    coefficients, covers c^2 x^2 and x^4), ``piecewise`` (continuous,
    polynomial pieces between ``breaks``).
    """

    kind: str
    coeffs: tuple = ()
    breaks: tuple = ()
    pieces: tuple = ()

    @classmethod
    def constant(cls, v):
        return cls("constant", (float(v),))

    @classmethod
    def quadratic(cls, c):
        return cls("polynomial", (0.0, 0.0, float(c) ** 2))

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", tuple(float(v) for v in coeffs))

    @classmethod
    def piecewise(cls, breaks, pieces):
        """``breaks`` interior points, increasing; ``pieces`` one coefficient tuple per interval."""
        breaks = tuple(float(b) for b in breaks)
        pieces = tuple(tuple(float(v) for v in p) for p in pieces)
        if len(pieces) != len(breaks) + 1:
            raise DomainError("need one piece per interval")
        if list(breaks) != sorted(breaks) or any(abs(b) >= 1 for b in breaks):
            raise DomainError("breaks must be increasing and interior")
        return cls("piecewise", (), breaks, pieces)

    def __post_init__(self):
        if self.kind not in ("constant", "polynomial", "piecewise"):
            raise DomainError(f"unknown potential kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.coeffs[0])
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.coeffs)
        idx = np.searchsorted(self.breaks, x, side="right")
        out = np.empty_like(x)
        for i, p in enumerate(self.pieces):
            m = idx == i
            out[m] = np.polynomial.polynomial.polyval(x[m], p)
        return out

    @property
    def degree(self):
        if self.kind == "constant":
            return 0
        if self.kind == "polynomial":
            return len(self.coeffs) - 1
        return max(len(p) for p in self.pieces) - 1

    @property
    def is_constant(self):
        if self.kind == "constant":
            return True
        if self.kind == "polynomial":
            return not np.any(self.coeffs[1:])
        return False

    @property
    def is_even(self):
        if self.kind == "constant":
            return True
        if self.kind == "polynomial":
            return not np.any(self.coeffs[1::2])
        return False

    def sample(self, n=20001):
        x = np.concatenate([np.cos(np.linspace(0, np.pi, n)), np.asarray(self.breaks)])
        return self(x)

    def sup(self):
        return float(np.max(self.sample()))

    def check_nonnegative(self):
        lo = float(np.min(self.sample()))
        if lo < -1e-12:
            raise PotentialNegative("potential takes negative values", min=lo)

    def to_dict(self):
        return {"kind": self.kind, "coeffs": list(self.coeffs), "breaks": list(self.breaks),
                "pieces": [list(p) for p in self.pieces]}


@dataclass(frozen=True)
class JacobiPerturbationProblem:
    alpha: float
    beta: float
    potential: Potential
    truncation_N: int | None = None

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError("alpha and beta must exceed -1", alpha=self.alpha, beta=self.beta)
        self.potential.check_nonnegative()

    @property
    def basis(self):
        return BasisSpec.jacobi(self.alpha, self.beta)

    def truncation(self, n_max):
        if self.truncation_N is not None:
            if self.truncation_N < n_max:
                raise DomainError("truncation below n_max", N=self.truncation_N, n_max=n_max)
            return int(self.truncation_N)
        return 2 * int(n_max) + int(math.ceil(math.sqrt(self.potential.sup()))) + 30


def _jacobi_lambdas(alpha, beta, N):
    n = np.arange(N + 1, dtype=float)
    return n * (n + alpha + beta + 1)


def _piece_rule(spec, a, b, m):
    """Nodes/weights for int_a^b g(x) w(x) dx, w the Jacobi weight, exact-ish for smooth g."""
    al, be = spec.alpha, spec.beta
    half = 0.5 * (b - a)
    left, right = a == -1.0, b == 1.0
    if left and right:
        r = gauss_rule(spec, m)
        return r.nodes, r.weights
    # singular factors at whichever ends are the interval ends; the rest is smooth
    ja = al if right else 0.0
    jb = be if left else 0.0
    u, w = roots_jacobi(m, ja, jb)
    x = a + half * (u + 1)
    w = w * half ** (1 + ja + jb)
    if not right:
        w = w * (1 - x) ** al
    if not left:
        w = w * (1 + x) ** be
    return x, w


def potential_matrix(problem: JacobiPerturbationProblem, N, extra_nodes=32):
    """M[n, k] = int V p_n p_k w, n, k <= N (Gauss-Jacobi; exact for polynomial V)."""
    spec = problem.basis
    V = problem.potential
    if V.kind == "constant":
        return V.coeffs[0] * np.eye(N + 1)
    if V.kind == "polynomial":
        r = gauss_rule(spec, N + V.degree // 2 + 2)
        nodes, weights = r.nodes, r.weights
    else:
        edges = [-1.0, *V.breaks, 1.0]
        parts = [_piece_rule(spec, a, b, N + extra_nodes) for a, b in zip(edges[:-1], edges[1:])]
        nodes = np.concatenate([p[0] for p in parts])
        weights = np.concatenate([p[1] for p in parts])
    B = basis_matrix(spec, N, nodes)
    M = (B * (weights * V(nodes))) @ B.T
    return 0.5 * (M + M.T)


def _sign_fix(vecs):
    for row in vecs:
        i = int(np.argmax(np.abs(row)))
        if row[i] < 0:
            row *= -1.0
    return vecs


def solve_jacobi_perturbed(problem: JacobiPerturbationProblem, n_max, check_tail=True, tail_tol=TAIL_TOL):
    """First n_max + 1 eigenpairs of L + V in the orthonormal Jacobi basis.

    With alpha = beta and an even potential the matrix splits by parity and
    each block is solved on its own; otherwise a dense symmetric solve.
    """
    N = problem.truncation(n_max)
    spec = problem.basis
    A = np.diag(_jacobi_lambdas(spec.alpha, spec.beta, N)) + potential_matrix(problem, N)
    if spec.is_symmetric and problem.potential.is_even:
        chis, vecs, par = [], [], []
        for p in (0, 1):
            idx = np.arange(p, N + 1, 2)
            w, U = np.linalg.eigh(A[np.ix_(idx, idx)])
            full = np.zeros((len(w), N + 1))
            full[:, idx] = U.T
            chis.append(w)
            vecs.append(full)
            par.append(np.full(len(w), p))
        chis = np.concatenate(chis)
        vecs = np.vstack(vecs)
        par = np.concatenate(par)
        order = np.argsort(chis, kind="stable")[: n_max + 1]
        chis, vecs, par = chis[order], vecs[order], par[order]
    else:
        w, U = np.linalg.eigh(A)
        chis, vecs = w[: n_max + 1], U.T[: n_max + 1].copy()
        par = np.full(n_max + 1, -1)
    vecs = _sign_fix(np.array(vecs))
    m = N + 1
    start = m - max(1, int(math.ceil(0.1 * m)))
    tail = np.linalg.norm(vecs[:, start:], axis=1)
    if check_tail and np.any(tail > tail_tol):
        bad = int(np.argmax(tail > tail_tol))
        raise TruncationInsufficient("coefficient tail too large", n=bad, tail=float(tail[bad]), N=N)
    params = {"alpha": float(spec.alpha), "beta": float(spec.beta), "potential": problem.potential.kind,
              "sup_V": problem.potential.sup()}
    return SpectralDecomposition(chis, vecs, par, tail, 0.0, N, spec, "jacobi_perturbed", params)


def jacobi_decomposition(alpha, beta, n_max, N=None):
    """Unperturbed Jacobi operator: identity coefficients, lambda_n = n(n+a+b+1)."""
    N = n_max if N is None else N
    spec = BasisSpec.jacobi(alpha, beta)
    coeffs = np.eye(n_max + 1, N + 1)
    return SpectralDecomposition(_jacobi_lambdas(alpha, beta, n_max), coeffs, np.arange(n_max + 1) % 2,
                                 np.zeros(n_max + 1), 0.0, N, spec, "jacobi",
                                 {"alpha": float(alpha), "beta": float(beta)})


def verify_interlacing(problem: JacobiPerturbationProblem, n_max, decomposition=None, check_tail=True):
    """lambda_n <= chi_n <= lambda_n + sup V for n <= n_max (1e-9 slack)."""
    dec = decomposition or solve_jacobi_perturbed(problem, n_max, check_tail=check_tail)
    lam = _jacobi_lambdas(problem.alpha, problem.beta, n_max)
    chi = dec.chis[: n_max + 1]
    vs = problem.potential.sup()
    lo = chi - lam
    hi = lam + vs - chi
    if np.min(lo) < -BRACKET_SLACK or np.min(hi) < -BRACKET_SLACK:
        n = int(np.argmin(np.minimum(lo, hi)))
        raise InterlacingViolation("eigenvalue bracket violated", n=n, chi=float(chi[n]), lam=float(lam[n]), sup_V=vs)
    strict = not problem.potential.is_constant
    report = {
        "n_max": int(n_max), "sup_V": vs, "min_lower_gap": float(np.min(lo)), "min_upper_gap": float(np.min(hi)),
        "strict_lower": bool(np.all(lo > 0)) if strict else None,
        "strict_upper": bool(np.all(hi > 0)) if strict else None,
        "parity_alternates": bool(np.all(dec.parity[: n_max + 1] == np.arange(n_max + 1) % 2))
        if np.all(dec.parity >= 0) else None,
    }
    return report


def _jacobi_sup_bound(spec, n):
    """max(|p_n(1)|, |p_n(-1)|) for the orthonormal Jacobi polynomial (the sup when a, b >= -1/2)."""
    n = np.asarray(n, dtype=float)
    a, b = spec.alpha, spec.beta

    def endpoint(a, b):
        # P_n^{(a,b)}(1) = binom(n+a, n); squared norm h_n
        log_val = gammaln(n + a + 1) - gammaln(n + 1) - gammaln(a + 1)
        log_h = ((a + b + 1) * math.log(2) + gammaln(n + a + 1) + gammaln(n + b + 1)
                 - np.log(2 * n + a + b + 1) - gammaln(n + a + b + 1) - gammaln(n + 1))
        # n = 0 with a + b + 1 = 0 needs the limit; use the mass directly
        out = np.exp(log_val - 0.5 * log_h)
        return out

    with np.errstate(all="ignore"):
        v = np.maximum(endpoint(a, b), endpoint(b, a))
    v = np.where(n == 0, 1.0 / math.sqrt(weight_mass(spec)), v)
    return np.maximum(v, 1.0)


def _jacobi_heat_terms(alpha, beta, t):
    n = 0
    while -t * n * (n + alpha + beta + 1) + 2 * (max(alpha, beta, -0.5) + 1) * math.log(n + 2) + math.log(n + 2) >= math.log(HEAT_TOL):
        n += 1
    return n


def jacobi_heat_kernel(dec: SpectralDecomposition, t, x, y, n_terms):
    """sum_{n <= n_terms} exp(-t chi_n) psi_n(x) psi_n(y) with tail and rounding bounds."""
    w = np.exp(-t * dec.chis[: n_terms + 1])
    B = basis_matrix(dec.basis, dec.N, np.concatenate([np.ravel(x), np.ravel(y)]))
    Psi = dec.coeffs[: n_terms + 1] @ B
    Px, Py = Psi[:, : np.size(x)], Psi[:, np.size(x):]
    vals = Px.T @ (w[:, None] * Py)
    absum = np.abs(Px).T @ (w[:, None] * np.abs(Py))
    # tail: chi_n >= lambda_n, sup|psi_n| <= sum_k |d_nk| sup|p_k| <= S_{N} * sqrt(N+1) for the Galerkin span
    spec = dec.basis
    n = np.arange(n_terms + 1, n_terms + 2001, dtype=float)
    S = _jacobi_sup_bound(spec, np.array([float(dec.N)]))[0] * math.sqrt(dec.N + 1)
    lam = _jacobi_lambdas(spec.alpha, spec.beta, int(n[-1]))[n_terms + 1:]
    tail = float(np.sum(np.exp(-t * lam)) * S * S)
    return vals, tail, (4 * n_terms + 32) * EPS * absum


def jacobi_heat_sandwich(problem: JacobiPerturbationProblem, t_grid, n_grid=31, raise_on_violation=True):
    """exp(-t sup V) K_L - eps <= K_{L_V} <= K_L + eps on a theta-uniform grid, plus an envelope fit.

    The envelope fit uses the surrogate ball size
    r (1-x+r^2)^(a+1/2) (1+x+r^2)^(b+1/2) with r = sqrt t.
    """
    spec = problem.basis
    vs = problem.potential.sup()
    x = theta_grid(n_grid)
    th = theta(x)
    n_max = max(_jacobi_heat_terms(spec.alpha, spec.beta, t) for t in t_grid)
    decV = solve_jacobi_perturbed(problem, n_max)
    dec0 = jacobi_decomposition(spec.alpha, spec.beta, n_max, decV.N)
    rows, data = [], []
    worst_lo = worst_hi = math.inf
    for t in t_grid:
        nt = _jacobi_heat_terms(spec.alpha, spec.beta, t)
        K0, tail0, rnd0 = jacobi_heat_kernel(dec0, t, x, x, nt)
        KV, tailV, rndV = jacobi_heat_kernel(decV, t, x, x, nt)
        eps = tail0 + tailV + rnd0 + rndV
        lo = KV - (math.exp(-t * vs) * K0 - eps)
        hi = K0 + eps - KV
        for slack, side in ((lo, "lower"), (hi, "upper")):
            i, j = np.unravel_index(np.argmin(slack), slack.shape)
            if slack[i, j] < 0 and raise_on_violation:
                raise SandwichViolation(f"{side} sandwich bound violated", t=float(t), x=float(x[i]), y=float(x[j]),
                                        K_V=float(KV[i, j]), K_0=float(K0[i, j]))
        worst_lo = min(worst_lo, float(lo.min()))
        worst_hi = min(worst_hi, float(hi.min()))
        Vs = jacobi_ball_surrogate(x, math.sqrt(t), spec.alpha, spec.beta)
        r = KV * np.sqrt(np.outer(Vs, Vs))
        rho = np.abs(np.subtract.outer(th, th))
        mask = KV > np.maximum(1e3 * eps, 1e-10 * np.max(np.abs(KV)))
        data.append((t, r, rho, mask))
        rows.append({"t": float(t), "n_terms": nt + 1, "lower_slack": float(lo.min()), "upper_slack": float(hi.min()),
                     "eps_max": float(np.max(eps))})
    c1, c2, c3, c4 = envelope_constants(data, vs)
    return {"alpha": spec.alpha, "beta": spec.beta, "sup_V": vs, "passed": worst_lo >= 0 and worst_hi >= 0,
            "worst_lower_slack": worst_lo, "worst_upper_slack": worst_hi, "per_t": rows,
            "envelope": {"c1": c1, "c2": c2, "c3": c3, "c4": c4}}


def markov_defect(alpha, beta, t, x, n_quad=None):
    """int K_L(x, y) w(y) dy - 1 for the unperturbed Jacobi heat kernel, by Gauss-Jacobi quadrature."""
    spec = BasisSpec.jacobi(alpha, beta)
    nt = _jacobi_heat_terms(alpha, beta, t)
    dec = jacobi_decomposition(alpha, beta, nt)
    rule = gauss_rule(spec, n_quad or nt + 8)
    K, _, _ = jacobi_heat_kernel(dec, t, np.asarray(x, dtype=float), rule.nodes, nt)
    return K @ rule.weights - 1.0


# -- ball -------------------------------------------------------------------

def harmonic_dimension(n, d):
    """Dimension of the degree-n spherical harmonics on S^{d-1} (d = 1: the two parities)."""
    if d == 1:
        return 1 if n in (0, 1) else 0
    if n == 0:
        return 1
    return math.comb(n + d - 1, d - 1) - math.comb(n + d - 3, d - 1)


def sphere_area(d):
    """|S^{d-1}|; for d = 1 the two-point sphere has counting measure 2."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class BallProblem:
    d: int
    gamma: float
    c: float
    n_max: int
    k_max: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError("d must be a positive integer", d=self.d)
        if not self.gamma > -0.5:
            raise DomainError("gamma must exceed -1/2", gamma=self.gamma)
        if self.c < 0:
            raise DomainError("c must be nonnegative", c=self.c)
        if self.d == 1 and self.n_max > 1:
            raise DomainError("d = 1 has harmonic degrees 0 and 1 only")

    def radial_spec(self, n):
        return BasisSpec.jacobi(self.gamma - 0.5, n + self.d / 2 - 1)

    def lam(self, m):
        m = np.asarray(m, dtype=float)
        return m * (m + self.d + 2 * self.gamma - 1)


@dataclass(frozen=True)
class BallTable:
    problem: BallProblem
    chi: np.ndarray          # (n_max+1, k_max+1)
    lam: np.ndarray
    vectors: tuple = field(repr=False, default=())   # per n: (k_max+1, K+1) radial Jacobi coefficients
    tail: np.ndarray = field(repr=False, default=None)

    def rows(self):
        out = []
        for n in range(self.chi.shape[0]):
            for k in range(self.chi.shape[1]):
                out.append({"n": n, "k": k, "chi": float(self.chi[n, k]), "lambda": float(self.lam[n, k]),
                            "gap": float(self.chi[n, k] - self.lam[n, k])})
        return out


def _radial_block(problem: BallProblem, n, K):
    spec = problem.radial_spec(n)
    k = np.arange(K + 1)
    diag_l = problem.lam(n + 2 * k)
    b, a = recurrence(spec, K + 1)
    J = np.diag(b[: K + 1]) + np.diag(a[:K], 1) + np.diag(a[:K], -1)
    c2 = problem.c**2
    return np.diag(diag_l) + 0.5 * c2 * (np.eye(K + 1) + J)


def ball_eigenvalues(problem: BallProblem, margin=None, check_tail=True):
    """Table chi[n, k] of the radial blocks, n <= n_max, k <= k_max."""
    K = problem.k_max + (margin if margin is not None else 20 + int(math.ceil(problem.c)))
    chi = np.empty((problem.n_max + 1, problem.k_max + 1))
    vecs = []
    tails = np.empty_like(chi)
    for n in range(problem.n_max + 1):
        w, U = np.linalg.eigh(_radial_block(problem, n, K))
        V = _sign_fix(U.T[: problem.k_max + 1].copy())
        start = (K + 1) - max(1, int(math.ceil(0.1 * (K + 1))))
        tails[n] = np.linalg.norm(V[:, start:], axis=1)
        if check_tail and np.any(tails[n] > TAIL_TOL):
            raise TruncationInsufficient("radial block tail too large", n=n, tail=float(tails[n].max()), K=K)
        chi[n] = w[: problem.k_max + 1]
        vecs.append(V)
    n = np.arange(problem.n_max + 1)[:, None]
    k = np.arange(problem.k_max + 1)[None, :]
    return BallTable(problem, chi, problem.lam(n + 2 * k), tuple(vecs), tails)


def verify_ball_brackets(table: BallTable):
    """lambda_{n+2k} < chi_nk < lambda_{n+2k} + c^2, plus monotonicity in n and k."""
    c2 = table.problem.c**2
    lo = table.chi - table.lam
    hi = table.lam + c2 - table.chi
    if table.problem.c > 0:
        ok = (lo.min() > -BRACKET_SLACK) and (hi.min() > -BRACKET_SLACK)
    else:
        ok = np.max(np.abs(lo)) <= BRACKET_SLACK * max(1.0, table.lam.max())
    if not ok:
        n, k = np.unravel_index(np.argmin(np.minimum(lo, hi)), lo.shape)
        raise InterlacingViolation("ball eigenvalue bracket violated", n=int(n), k=int(k), chi=float(table.chi[n, k]))
    mono_k = bool(np.all(np.diff(table.chi, axis=1) > 0))
    mono_n = bool(np.all(np.diff(table.chi, axis=0) > 0)) if table.chi.shape[0] > 1 else True
    return {"min_lower_gap": float(lo.min()), "min_upper_gap": float(hi.min()),
            "strict": bool(lo.min() > 0 and hi.min() > 0), "monotone_k": mono_k, "monotone_n": mono_n}


def _radial_functions(problem, n, vectors, r):
    """phi_nk(2 r^2 - 1) * r^n, normalized so the ball functions are orthonormal (up to Y)."""
    spec = problem.radial_spec(n)
    K = vectors.shape[1] - 1
    u = 2 * np.asarray(r, dtype=float) ** 2 - 1
    B = basis_matrix(spec, K, np.clip(u, -1, 1))
    fac = 2.0 ** ((spec.alpha + spec.beta + 2) / 2)
    return fac * (vectors @ B) * np.asarray(r, dtype=float) ** n


def _ball_terms(problem, t):
    """Largest m = n + 2k kept: exp(-t lambda_m) m^(d + 2 gamma + 3) < 1e-16."""
    m = 0
    p = problem.d + 2 * max(problem.gamma, 0.0) + 3
    while -t * float(problem.lam(m)) + p * math.log(m + 2) >= math.log(HEAT_TOL):
        m += 1
    return m


def ball_radial_kernel(table: BallTable, t, r, r2):
    """Heat kernel at x = r e, y = r2 e (signed radii along a common diameter).

    Uses sum_j Y_nj(e) Y_nj(e) = N(n,d)/|S^{d-1}| and |x|^n Y(x/|x|) = r^n Y(e).
    """
    prob = table.problem
    r = np.asarray(r, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros((r.size, r2.size))
    area = sphere_area(prob.d) if prob.d > 1 else 2.0
    for n in range(prob.n_max + 1):
        kmax = min(prob.k_max, int(table.chi.shape[1]) - 1)
        Nh = harmonic_dimension(n, prob.d)
        if Nh == 0:
            continue
        V = table.vectors[n][: kmax + 1]
        Fx = _radial_functions(prob, n, V, r)
        Fy = _radial_functions(prob, n, V, r2)
        w = np.exp(-t * table.chi[n, : kmax + 1])
        out += (Nh / area) * (Fx.T @ (w[:, None] * Fy))
    return out


def ball_sandwich_diagonal(d, gamma, c, t_grid, n_radial=25, raise_on_violation=True):
    """exp(-t c^2) K_{L_0} <= p_t <= K_{L_0} on a diameter slice of the ball."""
    if d not in (2, 3):
        raise DimensionUnsupported("ball kernels are evaluated for d in {2, 3}", d=d)
    m_max = max(_ball_terms(BallProblem(d, gamma, 0.0, 0, 0), t) for t in t_grid)
    # arcsin-uniform grid on the diameter: equally spaced in the ball metric
    r = np.sin(np.linspace(-np.pi / 2, np.pi / 2, n_radial))
    r[0], r[-1] = -1.0, 1.0
    tabc = ball_eigenvalues(BallProblem(d, gamma, c, m_max, m_max // 2 + 1))
    tab0 = ball_eigenvalues(BallProblem(d, gamma, 0.0, m_max, m_max // 2 + 1))
    pts = np.stack([r, np.zeros_like(r)] + [np.zeros_like(r)] * (d - 2), axis=1)
    rho = ball_metric(pts[:, None, :], pts[None, :, :])
    rows, data = [], []
    worst_lo = worst_hi = math.inf
    for t in t_grid:
        Kc = ball_radial_kernel(tabc, t, r, r)
        K0 = ball_radial_kernel(tab0, t, r, r)
        eps = 1e-12 * max(1.0, float(np.max(np.abs(K0))))
        lo = Kc - (math.exp(-t * c * c) * K0 - eps)
        hi = K0 + eps - Kc
        for slack, side in ((lo, "lower"), (hi, "upper")):
            i, j = np.unravel_index(np.argmin(slack), slack.shape)
            if slack[i, j] < 0 and raise_on_violation:
                raise SandwichViolation(f"{side} ball sandwich violated", t=float(t), r=float(r[i]), r2=float(r[j]))
        worst_lo = min(worst_lo, float(lo.min()))
        worst_hi = min(worst_hi, float(hi.min()))
        Vs = np.array([ball_volume_weighted(min(abs(v), 1 - 1e-15), math.sqrt(t), gamma, d) for v in r])
        data.append((t, Kc * np.sqrt(np.outer(Vs, Vs)), rho, Kc > 1e-10 * np.max(np.abs(Kc))))
        rows.append({"t": float(t), "lower_slack": float(lo.min()), "upper_slack": float(hi.min())})
    c1, c2, c3, c4 = envelope_constants(data, c * c)
    return {"d": d, "gamma": gamma, "c": c, "passed": worst_lo >= 0 and worst_hi >= 0, "m_max": m_max,
            "worst_lower_slack": worst_lo, "worst_upper_slack": worst_hi, "per_t": rows,
            "envelope": {"c1": c1, "c2": c2, "c3": c3, "c4": c4}}
