"""Arccos metric and ball measures on [-1, 1] (plus ball-case surrogates)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "MetricPoint",
    "theta",
    "rho",
    "ball_measure",
    "ball_measure_surrogate",
    "check_doubling",
    "fit_double3_constant",
    "ball_volume_weighted",
    "jacobi_ball_surrogate",
    "ball_metric",
    "theta_grid",
    "integral_bound_check",
]


def _check_interval(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainError(f"{name} must lie in [-1, 1]")
    return x


def theta(x):
    """arccos x, computed as atan2(sqrt((1-x)(1+x)), x) for accuracy near +-1."""
    x = _check_interval(x)
    return np.arctan2(np.sqrt((1.0 - x) * (1.0 + x)), x)


@dataclass(frozen=True)
class MetricPoint:
    x: float
    theta: float

    @classmethod
    def at(cls, x):
        return cls(float(x), float(theta(x)))


def rho(x, y):
    """Distance |arccos x - arccos y|, broadcasting over arrays."""
    out = np.abs(theta(x) - theta(y))
    return float(out) if np.ndim(out) == 0 else out


def ball_measure(x, r):
    """Exact Lebesgue measure of B(x, r) = {y : rho(x, y) < r}."""
    th = theta(x)
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("radius must be positive")
    lo = np.maximum(0.0, th - r)
    hi = np.minimum(np.pi, th + r)
    # cos a - cos b = 2 sin((a+b)/2) sin((b-a)/2): no cancellation for small r
    out = 2.0 * np.sin(0.5 * (lo + hi)) * np.sin(0.5 * (hi - lo))
    out = np.where(r >= np.pi, 2.0, out)
    return float(out) if out.ndim == 0 else out


def ball_measure_surrogate(x, r):
    """r (sqrt(1-x^2) + r), the two-sided equivalent of the ball measure."""
    x = _check_interval(x)
    r = np.asarray(r, dtype=float)
    return r * (np.sqrt((1.0 - x) * (1.0 + x)) + r)


def check_doubling(x_grid, r_grid):
    """Worst ratio V(x, 2r) / V(x, r) over the tensor grid."""
    x = _check_interval(np.ravel(x_grid))[:, None]
    r = np.asarray(np.ravel(r_grid), dtype=float)[None, :]
    if x.size == 0 or r.size == 0:
        raise DomainError("grids must be nonempty")
    return float(np.max(ball_measure(x, 2 * r) / ball_measure(x, r)))


def fit_double3_constant(x_grid, r_grid):
    """Smallest c0 with V(x,r) <= c0 (1 + rho(x,y)/r)^2 V(y,r) on the grid."""
    x = _check_interval(np.ravel(x_grid))
    r = np.asarray(np.ravel(r_grid), dtype=float)
    th = theta(x)
    d = np.abs(th[:, None] - th[None, :])
    best = 0.0
    for rr in r:
        V = ball_measure(x, rr)
        ratio = V[:, None] / ((1 + d / rr) ** 2 * V[None, :])
        best = max(best, float(ratio.max()))
    return best


def ball_volume_weighted(norm_x, r, gamma, d):
    """Surrogate r^d (1 - |x|^2 + r^2)^gamma for balls in the weighted unit ball."""
    if not (0 <= norm_x < 1):
        raise DomainError("norm_x must lie in [0, 1)", norm_x=norm_x)
    if not (0 < r <= np.pi):
        raise DomainError("r must lie in (0, pi]", r=r)
    if not gamma > -0.5:
        raise DomainError("gamma must exceed -1/2", gamma=gamma)
    if int(d) != d or d < 2:
        raise DomainError("d must be an integer >= 2", d=d)
    return r**d * (1.0 - norm_x**2 + r**2) ** gamma


def jacobi_ball_surrogate(x, r, alpha, beta):
    """r (1 - x + r^2)^(alpha+1/2) (1 + x + r^2)^(beta+1/2), the weighted-interval ball size."""
    x = _check_interval(x)
    r = np.asarray(r, dtype=float)
    return r * (1 - x + r * r) ** (alpha + 0.5) * (1 + x + r * r) ** (beta + 0.5)


def ball_metric(x, y):
    """Geodesic distance on the unit ball lifted to the upper hemisphere.

    ``x`` and ``y`` are arrays whose last axis holds coordinates.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.sum(x * x, axis=-1)
    ny = np.sum(y * y, axis=-1)
    if np.any(nx > 1) or np.any(ny > 1):
        raise DomainError("points must lie in the closed unit ball")
    cosang = np.sum(x * y, axis=-1) + np.sqrt((1 - nx) * (1 - ny))
    return np.arccos(np.clip(cosang, -1.0, 1.0))


def theta_grid(n, endpoints=True):
    """``n`` points uniform in theta, returned in increasing x.

    With ``endpoints=False`` the Chebyshev (first kind) interior points are
    used instead, which avoids the singular factors at +-1.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if endpoints:
        th = np.linspace(np.pi, 0.0, n) if n > 1 else np.array([np.pi / 2])
    else:
        th = (np.arange(n, 0, -1) - 0.5) * np.pi / n
    x = np.cos(th)
    if endpoints and n > 1:
        x[0], x[-1] = -1.0, 1.0
    return x


def integral_bound_check(x_grid, deltas, sigma, n_panels=64, order=24):
    """Worst ratio of int (1 + rho(x,y)/delta)^-sigma dy to V(x, delta).

    The integral is done in theta (dy = sin(phi) dphi) with composite
    Gauss-Legendre panels refined around theta(x).
    """
    gx, gw = np.polynomial.legendre.leggauss(order)
    x = _check_interval(np.ravel(x_grid))
    worst = 0.0
    for delta in np.ravel(deltas):
        for xi in x:
            th = float(theta(xi))
            # panel breakpoints graded towards th
            breaks = {0.0, np.pi, th}
            for k in range(n_panels // 2):
                h = delta * 2.0 ** (k / 2) * 0.05
                breaks.update([th - h, th + h])
            b = np.array(sorted(v for v in breaks if 0.0 <= v <= np.pi))
            a0, a1 = b[:-1], b[1:]
            mid, half = 0.5 * (a0 + a1), 0.5 * (a1 - a0)
            phi = mid[:, None] + half[:, None] * gx[None, :]
            w = half[:, None] * gw[None, :]
            vals = (1 + np.abs(phi - th) / delta) ** (-sigma) * np.sin(phi)
            integral = float(np.sum(vals * w))
            worst = max(worst, integral / ball_measure(xi, delta))
    return worst
