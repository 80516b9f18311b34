"""Heat kernels of the Legendre operator and of L_c by eigen-series.

Both kernels are truncated eigen-expansions

    p_t(x, y) = sum_n exp(-t chi_n) psi_n(x) psi_n(y)

with a certified remainder built from chi_n >= n(n+1) and the sup-norm
bound sup|psi_n| <= sqrt(n+1/2) + 2c^2/sqrt(n+1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, FitDegenerate, SandwichViolation, TruncationInsufficient
from .geometry import ball_measure, theta, theta_grid
from .orthopoly import LEGENDRE, basis_matrix, gauss_rule
from .pswf import ProlateProblem, SpectralDecomposition, solve_eigensystem

__all__ = [
    "KernelGrid",
    "GaussianEnvelopeFit",
    "legendre_decomposition",
    "prolate_decomposition",
    "heat_terms_needed",
    "sup_norm_bound",
    "series_tail_bound",
    "eval_heat_kernel",
    "row_integrals",
    "verify_pswf_sandwich",
    "envelope_ratio",
    "envelope_constants",
    "fit_gaussian_envelope",
    "fit_envelope_bands",
    "verify_holder_alpha1",
    "lipschitz_fit",
    "fit_gradient_shape",
    "davies_gaffney_check",
    "gaussian_convolution_constant",
]

EPS = np.finfo(float).eps
HEAT_TAIL_TOL = 1e-16
# amplitude slack that makes the two-constant envelope fit unique
ENVELOPE_SLACK = 1.25


@lru_cache(maxsize=16)
def legendre_decomposition(n_max: int) -> SpectralDecomposition:
    """The Legendre operator's own eigenbasis: chi_n = n(n+1), psi_n = P_n."""
    n = np.arange(n_max + 1)
    coeffs = np.eye(n_max + 1)
    coeffs.setflags(write=False)
    return SpectralDecomposition(n * (n + 1.0), coeffs, n % 2, np.zeros(n_max + 1), 0.0, int(n_max), kind="legendre")


@lru_cache(maxsize=32)
def prolate_decomposition(c: float, n_max: int) -> SpectralDecomposition:
    return solve_eigensystem(ProlateProblem.for_n_max(float(c), int(n_max)), int(n_max))


def heat_terms_needed(t: float) -> int:
    """Smallest N with exp(-t N(N+1)) (N+1)^3 < 1e-16."""
    if not t > 0:
        raise DomainError("t must be positive", t=t)
    N = 0
    while -t * N * (N + 1) + 3 * math.log(N + 1) >= math.log(HEAT_TAIL_TOL):
        N += 1
    return N


def sup_norm_bound(n, c):
    """sqrt(n+1/2) + 2c^2/sqrt(n+1/2), a bound on sup|psi_n| (sqrt(n+1/2) when c = 0)."""
    s = np.sqrt(np.asarray(n, dtype=float) + 0.5)
    return s + 2.0 * c * c / s


def series_tail_bound(t, N, c, weight=None):
    """Bound on sum_{n > N} w(n) sup|psi_n|^2.

    ``weight(n)`` must bound the series weight and be eventually
    decreasing; the sum is carried until the terms drop below 1e-30 of the
    running total, then closed with a geometric bound from the last ratio.
    """
    if weight is None:
        weight = lambda n: np.exp(-t * n * (n + 1.0))  # noqa: E731
    total = 0.0
    n = N + 1
    prev = None
    while True:
        term = float(weight(n) * sup_norm_bound(n, c) ** 2)
        total += term
        if prev is not None and prev > 0:
            q = term / prev
            if q < 1 and term <= 1e-30 * max(total, 1e-300):
                total += term * q / (1 - q)
                return total
        if term == 0.0:
            return total
        prev = term
        n += 1
        if n > N + 10**6:  # pragma: no cover
            raise TruncationInsufficient("tail sum did not converge", N=N)


@dataclass(frozen=True)
class KernelGrid:
    """Kernel values on a tensor grid.

    ``series_tail_bound`` certifies the dropped eigen-series terms;
    ``rounding_bound`` is a floating-point estimate ((4N+32) eps sum|terms|,
    pointwise).  ``error_bound`` is their sum.
    """

    x: np.ndarray
    y: np.ndarray
    t: float
    values: np.ndarray
    series_tail_bound: float
    rounding_bound: np.ndarray
    kind: str
    c: float = 0.0
    n_terms: int = 0
    scale_name: str = "t"

    @property
    def error_bound(self):
        return self.series_tail_bound + self.rounding_bound


def _decomposition_for(kind, c, n_needed, decomposition):
    if decomposition is not None:
        if len(decomposition.chis) < n_needed + 1:
            raise TruncationInsufficient(
                "decomposition too short for the tail rule",
                have=len(decomposition.chis) - 1,
                need=n_needed,
            )
        return decomposition
    if kind == "legendre":
        return legendre_decomposition(n_needed)
    if kind == "prolate":
        return prolate_decomposition(float(c), n_needed)
    raise DomainError(f"unknown kernel kind {kind!r}")


def spectral_kernel(dec: SpectralDecomposition, weights, x, y):
    """sum_n weights[n] psi_n(x) psi_n(y) and the matching sum of |terms|."""
    n = len(weights)
    B = basis_matrix(dec.basis, dec.N, np.concatenate([np.ravel(x), np.ravel(y)]))
    Psi = dec.coeffs[:n] @ B
    Px, Py = Psi[:, : np.size(x)], Psi[:, np.size(x) :]
    vals = Px.T @ (weights[:, None] * Py)
    absum = np.abs(Px).T @ (np.abs(weights)[:, None] * np.abs(Py))
    return vals, absum


def eval_heat_kernel(kind, t, x_nodes, y_nodes, decomposition=None, c=0.0):
    """Heat kernel of the Legendre operator (``kind="legendre"``) or of L_c.

    Args:
        kind: ``"legendre"`` or ``"prolate"``.
        t: time, > 0.
        x_nodes, y_nodes: points in [-1, 1].
        decomposition: optional precomputed eigensystem; it must reach the
            index N(t) of the tail rule.
        c: band-limit parameter for the prolate kind.

    Returns:
        KernelGrid.
    """
    if not t > 0:
        raise DomainError("t must be positive", t=t)
    if kind == "legendre":
        c = 0.0
    N = heat_terms_needed(t)
    dec = _decomposition_for(kind, c, N, decomposition)
    if kind == "prolate":
        c = dec.c
    w = np.exp(-t * dec.chis[: N + 1])
    x = np.asarray(x_nodes, dtype=float)
    y = np.asarray(y_nodes, dtype=float)
    vals, absum = spectral_kernel(dec, w, x, y)
    tail = series_tail_bound(t, N, c)
    rnd = (4 * N + 32) * EPS * absum
    return KernelGrid(x, y, float(t), vals, tail, rnd, kind, float(c), N + 1)


def row_integrals(kind, t, x_nodes, decomposition=None, c=0.0):
    """int_{-1}^{1} p_t(x, y) dy for each x, via int psi_n = sqrt(2) <psi_n, P_0>."""
    if kind == "legendre":
        c = 0.0
    N = heat_terms_needed(t)
    dec = _decomposition_for(kind, c, N, decomposition)
    w = np.exp(-t * dec.chis[: N + 1])
    mass = math.sqrt(2.0) * dec.coeffs[: N + 1, 0]
    Psi = dec.evaluate(np.asarray(x_nodes, dtype=float).ravel(), N + 1)
    return (w * mass) @ Psi


# -- sandwich -------------------------------------------------------------

def verify_pswf_sandwich(c, t_grid, grid, raise_on_violation=True):
    """Check exp(-t c^2) K_0 - eps <= p_t <= K_0 + eps entrywise.

    Returns a report with the worst lower and upper slacks (slack >= 0
    means the inequality holds) and the ratio range p_t / K_0 where
    K_0 > 1e-10.
    """
    x = np.asarray(grid, dtype=float)
    rows = []
    worst_lo, worst_hi = math.inf, math.inf
    ratio_lo, ratio_hi = math.inf, -math.inf
    for t in t_grid:
        K0 = eval_heat_kernel("legendre", t, x, x)
        Kc = eval_heat_kernel("prolate", t, x, x, c=c)
        eps = K0.error_bound + Kc.error_bound
        lower = math.exp(-t * c * c) * K0.values
        lo_slack = Kc.values - (lower - eps)
        hi_slack = K0.values + eps - Kc.values
        i_lo = np.unravel_index(np.argmin(lo_slack), lo_slack.shape)
        i_hi = np.unravel_index(np.argmin(hi_slack), hi_slack.shape)
        sel = K0.values > 1e-10
        ratio = Kc.values[sel] / K0.values[sel]
        row = {
            "t": float(t),
            "lower_slack": float(lo_slack[i_lo]),
            "upper_slack": float(hi_slack[i_hi]),
            "ratio_min": float(ratio.min()),
            "ratio_max": float(ratio.max()),
            "exp_minus_tc2": math.exp(-t * c * c),
            "eps_max": float(np.max(eps)),
        }
        rows.append(row)
        for slack, idx, side in ((lo_slack, i_lo, "lower"), (hi_slack, i_hi, "upper")):
            if slack[idx] < 0 and raise_on_violation:
                raise SandwichViolation(
                    f"{side} sandwich bound violated",
                    t=float(t), x=float(x[idx[0]]), y=float(x[idx[1]]),
                    p_t=float(Kc.values[idx]), k0=float(K0.values[idx]), eps=float(eps[idx]),
                )
        worst_lo = min(worst_lo, row["lower_slack"])
        worst_hi = min(worst_hi, row["upper_slack"])
        ratio_lo = min(ratio_lo, row["ratio_min"] / row["exp_minus_tc2"])
        ratio_hi = max(ratio_hi, row["ratio_max"])
    return {
        "c": float(c),
        "passed": worst_lo >= 0 and worst_hi >= 0,
        "worst_lower_slack": worst_lo,
        "worst_upper_slack": worst_hi,
        "min_ratio_over_exp": ratio_lo,
        "max_ratio": ratio_hi,
        "per_t": rows,
    }


# -- Gaussian envelope ----------------------------------------------------

@dataclass(frozen=True)
class GaussianEnvelopeFit:
    """Outer-fitted constants of

        c1 e^{-tc^2} exp(-rho^2/(c2 t)) <= p_t sqrt(V V) <= c3 exp(-rho^2/(c4 t)).
    """

    c1: float
    c2: float
    c3: float
    c4: float
    kind: str
    c: float
    t_values: tuple
    grid_size: int
    used_fraction: float
    stats: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
            "kind": self.kind, "c": self.c, "t_values": list(self.t_values),
            "grid_size": self.grid_size, "used_fraction": self.used_fraction, **self.stats,
        }


def envelope_ratio(K: KernelGrid):
    """(r, rho, mask): r = p_t sqrt(V(x,sqrt t) V(y,sqrt t)), mask = above noise."""
    st = math.sqrt(K.t)
    Vx = ball_measure(K.x, st)
    Vy = ball_measure(K.y, st)
    r = K.values * np.sqrt(np.outer(Vx, Vy))
    rho = np.abs(np.subtract.outer(theta(K.x), theta(K.y)))
    noise = np.maximum(1e3 * K.error_bound, 1e-10 * np.max(np.abs(K.values)))
    return r, rho, K.values > noise


def envelope_constants(data, killing=0.0):
    """(c1, c2, c3, c4) from [(t, r, rho, mask), ...] with r = K sqrt(V V).

    The lower bound carries the factor exp(-t killing).  Amplitudes are
    pinned at ENVELOPE_SLACK times their extreme values (see
    fit_gaussian_envelope).
    """
    c3 = ENVELOPE_SLACK * max(float(r[m].max()) for _, r, _, m in data)
    c1 = min(float((np.diag(r) * math.exp(t * killing)).min()) for t, r, _, _ in data) / ENVELOPE_SLACK
    c4 = 0.0
    c2 = math.inf
    for t, r, rho, m in data:
        off = m & (rho > 0)
        with np.errstate(divide="ignore"):
            up = rho[off] ** 2 / (t * np.log(c3 / r[off]))
        up = up[np.isfinite(up) & (up > 0)]
        if up.size:
            c4 = max(c4, float(up.max()))
        low_val = r[off] * math.exp(t * killing)
        below = low_val < c1
        if np.any(below):
            lo = rho[off][below] ** 2 / (t * np.log(c1 / low_val[below]))
            c2 = min(c2, float(lo.min()))
    if not (c4 > 0 and math.isfinite(c4) and math.isfinite(c2) and c1 > 0):
        raise FitDegenerate("envelope fit degenerate", c1=c1, c2=c2, c3=c3, c4=c4)
    return c1, c2, c3, c4


def fit_gaussian_envelope(kind, t_values, n_grid, c=0.0, decomposition=None):
    """Outer fit of the two-sided Gaussian bound over a set of times.

    A two-constant bound has a one-parameter family of outer fits; the
    amplitude is pinned at ENVELOPE_SLACK times its extreme value.  So c3
    is 1.25 max r and c4 the smallest width keeping r below
    c3 exp(-rho^2/(c4 t)); c1 is min over the diagonal of r e^{tc^2},
    divided by 1.25, and c2 the largest width keeping r e^{tc^2} above
    c1 exp(-rho^2/(c2 t)).  Only points above the noise level are used.
    """
    x = theta_grid(n_grid)
    if kind == "legendre":
        c = 0.0
    data = []
    used = total = 0
    for t in t_values:
        K = eval_heat_kernel(kind, t, x, x, decomposition, c)
        r, rho, mask = envelope_ratio(K)
        used += int(mask.sum())
        total += mask.size
        data.append((t, r, rho, mask))
    if used < 0.5 * total:
        raise FitDegenerate("kernel below noise on most of the grid", used_fraction=used / total)
    c1, c2, c3, c4 = envelope_constants(data, c * c)
    return GaussianEnvelopeFit(c1, c2, c3, c4, kind, float(c), tuple(float(t) for t in t_values), int(n_grid), used / total)


def fit_envelope_bands(kind, t0, n_grid, c=0.0, n_bands=3, per_band=2):
    """Separate envelope fits on dyadic bands [t0 2^k, t0 2^(k+1)), k < n_bands."""
    fits = []
    for k in range(n_bands):
        ts = [t0 * 2.0 ** (k + j / per_band) for j in range(per_band)]
        fits.append(fit_gaussian_envelope(kind, ts, n_grid, c))
    return fits


# -- Hölder / Lipschitz ---------------------------------------------------

def lipschitz_fit(values, th, scale, env, noise):
    """Largest |K(x,.) - K(x',.)| / ((rho(x,x')/scale) env(x,.)) over grid pairs.

    ``th`` must be uniform in theta (so rho is s*h for index offset s); pairs
    with rho(x,x') <= scale and both orderings (x, x') and (x', x) are used.
    Columns where both kernel values sit below ``noise`` are skipped.
    """
    h = abs(th[1] - th[0])
    smax = int(np.floor(scale / h * (1 + 1e-12)))
    best = 0.0
    big = np.abs(values) > noise
    for s in range(1, min(smax, len(th) - 1) + 1):
        diff = np.abs(values[s:] - values[:-s])
        ok = big[s:] | big[:-s]
        if not np.any(ok):
            continue
        fac = (s * h) / scale
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(ok, diff / (fac * env[:-s]), 0.0)
            r2 = np.where(ok, diff / (fac * env[s:]), 0.0)
        best = max(best, float(np.max(r1)), float(np.max(r2)))
    return best


def verify_holder_alpha1(kind, t_values, n_grid, c8, c=0.0):
    """Outer-fit C in |p_t(x,y) - p_t(x',y)| <= C (rho(x,x')/sqrt t) env(x, y).

    env(x, y) = exp(-rho(x,y)^2/(c8 t)) / sqrt(V(x,sqrt t) V(y,sqrt t)),
    over all grid pairs with 0 < rho(x,x') <= sqrt t.  Differences where
    both kernel values sit below the noise level are skipped.
    """
    x = theta_grid(n_grid)
    th = theta(x)
    if kind == "legendre":
        c = 0.0
    best = 0.0
    for t in t_values:
        K = eval_heat_kernel(kind, t, x, x, c=c)
        st = math.sqrt(t)
        V = ball_measure(x, st)
        noise = np.maximum(1e3 * K.error_bound, 1e-10 * np.max(np.abs(K.values)))
        rho_xy = np.abs(np.subtract.outer(th, th))
        env = np.exp(-rho_xy**2 / (c8 * t)) / np.sqrt(np.outer(V, V))
        best = max(best, lipschitz_fit(K.values, th, st, env, noise))
    return {"kind": kind, "c": float(c), "C": best, "c8": float(c8),
            "t_values": [float(t) for t in t_values], "n_grid": int(n_grid)}


def fit_gradient_shape(t_values, n_grid, h=1e-6):
    """One constant in |d/dx Q_t(x,y)| <= C t^-1/2 (1-x^2)^-1/2 exp(-rho^2/(C t)) / V(y, sqrt t).

    The derivative of the Legendre heat kernel is taken by central finite
    differences at interior Chebyshev points.  The smallest C is found by
    bisection (the right side increases with C).
    """
    x = theta_grid(n_grid, endpoints=False)
    th = theta(x)
    data = []
    for t in t_values:
        Kp = eval_heat_kernel("legendre", t, x + h, x)
        Km = eval_heat_kernel("legendre", t, x - h, x)
        grad = (Kp.values - Km.values) / (2 * h)
        V = ball_measure(x, math.sqrt(t))
        lhs = np.abs(grad) * math.sqrt(t) * np.sqrt(1 - x * x)[:, None] * V[None, :]
        rho2 = np.subtract.outer(th, th) ** 2
        noise = 1e-7 * np.max(np.abs(grad))
        sel = np.abs(grad) > noise
        data.append((t, lhs[sel], rho2[sel]))

    def ok(C):
        return all(np.all(g <= C * np.exp(-r2 / (C * t))) for t, g, r2 in data)

    lo, hi = 1e-3, 1.0
    while not ok(hi):
        hi *= 2
        if hi > 1e8:
            raise FitDegenerate("gradient shape constant diverges")
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


# -- Davies-Gaffney -------------------------------------------------------

def davies_gaffney_check(c, t_values, interval_pairs, c_hat, n_quad=64):
    """|<e^{-tL_c} 1_U1, 1_U2>| <= exp(-c_hat r^2 / t) ||1_U1|| ||1_U2||.

    The bilinear form is integrated with Gauss-Legendre rules on U1 and U2.
    ``r`` is the arccos distance between the intervals (0 if they meet).
    """
    g = gauss_rule(LEGENDRE, n_quad)
    rows = []
    for (a1, b1), (a2, b2) in interval_pairs:
        x1 = 0.5 * (b1 - a1) * g.nodes + 0.5 * (a1 + b1)
        w1 = 0.5 * (b1 - a1) * g.weights
        x2 = 0.5 * (b2 - a2) * g.nodes + 0.5 * (a2 + b2)
        w2 = 0.5 * (b2 - a2) * g.weights
        th1 = theta(np.array([a1, b1]))
        th2 = theta(np.array([a2, b2]))
        lo1, hi1 = sorted(th1)
        lo2, hi2 = sorted(th2)
        r = max(0.0, lo2 - hi1, lo1 - hi2)
        norm = math.sqrt((b1 - a1) * (b2 - a2))
        for t in t_values:
            K = eval_heat_kernel("prolate" if c > 0 else "legendre", t, x1, x2, c=c)
            form = float(w1 @ K.values @ w2)
            bound = math.exp(-c_hat * r * r / t) * norm
            rows.append({"U1": [a1, b1], "U2": [a2, b2], "t": float(t), "r": r,
                         "form": form, "bound": bound, "margin": bound - abs(form)})
    passed = all(row["margin"] >= 0 for row in rows)
    return {"c": float(c), "c_hat": float(c_hat), "passed": passed, "rows": rows}


def gaussian_convolution_constant(x_grid, y_grid, t, s_values, c_in, c_out, n_quad=200):
    """Fitted c'' in the Gaussian convolution bound on [-1, 1].

    int G_{t-s}(x,z) G_s(z,y) dz <= c'' exp(-rho(x,y)^2/(c_out t)) / sqrt(V(x,sqrt t)V(y,sqrt t)),
    G_s(x,z) = exp(-rho(x,z)^2/(c_in s)) / V(x, sqrt s).  The z-integral is
    done in theta with a composite Gauss rule.
    """
    gx, gw = np.polynomial.legendre.leggauss(20)
    edges = np.linspace(0, np.pi, n_quad // 20 * 4 + 1)
    mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
    phi = (mid[:, None] + half[:, None] * gx).ravel()
    wz = (half[:, None] * gw).ravel() * np.sin(phi)
    z = np.cos(phi)
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    thx, thy = theta(x), theta(y)
    best = 0.0
    for s in s_values:
        if not 0 < s < t:
            raise DomainError("need 0 < s < t")
        Gx = np.exp(-np.subtract.outer(thx, phi) ** 2 / (c_in * (t - s))) / ball_measure(x, math.sqrt(t - s))[:, None]
        Gy = np.exp(-np.subtract.outer(phi, thy) ** 2 / (c_in * s)) / ball_measure(z, math.sqrt(s))[:, None]
        lhs = Gx @ (wz[:, None] * Gy)
        rhs = np.exp(-np.subtract.outer(thx, thy) ** 2 / (c_out * t)) / np.sqrt(
            np.outer(ball_measure(x, math.sqrt(t)), ball_measure(y, math.sqrt(t))))
        best = max(best, float(np.max(lhs / rhs)))
    return best
