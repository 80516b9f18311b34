"""Normalized Legendre / Jacobi polynomials and Gauss rules.

All polynomials here are orthonormal with respect to their weight on
[-1, 1]:

    int_{-1}^{1} p_n(x) p_k(x) w(x) dx = delta_{nk},   w(x) = (1-x)^a (1+x)^b.

The Jacobi convention with squared norm ``2**(a+b+2)`` that shows up in
Zernike-type formulas is available through :func:`jacobi_norm_factor`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceFailure, DomainError

__all__ = [
    "BasisSpec",
    "QuadratureRule",
    "LEGENDRE",
    "recurrence",
    "weight_mass",
    "eval_legendre_normalized",
    "eval_jacobi_normalized",
    "basis_matrix",
    "basis_matrix_with_derivative",
    "series_eval",
    "gauss_rule",
    "legendre_x_coupling",
    "jacobi_norm_factor",
    "default_quadrature_nodes",
]


@dataclass(frozen=True)
class BasisSpec:
    """Orthonormal polynomial family.

    ``family`` is ``"legendre"`` or ``"jacobi"``; the Legendre family is
    the Jacobi family with ``alpha = beta = 0``.
    """

    family: str = "legendre"
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.family not in ("legendre", "jacobi"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "legendre" and (self.alpha != 0 or self.beta != 0):
            raise DomainError("Legendre family has alpha = beta = 0")
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError("Jacobi parameters must exceed -1", alpha=self.alpha, beta=self.beta)

    @classmethod
    def jacobi(cls, alpha, beta):
        return cls("jacobi", float(alpha), float(beta))

    @property
    def is_symmetric(self):
        return self.alpha == self.beta

    def weight(self, x):
        x = np.asarray(x, dtype=float)
        return (1.0 - x) ** self.alpha * (1.0 + x) ** self.beta

    def tag(self):
        if self.family == "legendre":
            return "legendre"
        return f"jacobi({self.alpha!r},{self.beta!r})"


LEGENDRE = BasisSpec()


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    spec: BasisSpec = LEGENDRE

    @property
    def order(self):
        return len(self.nodes)

    def integrate(self, values):
        """Apply the rule along the last axis of ``values``."""
        return np.asarray(values) @ self.weights


def weight_mass(spec: BasisSpec) -> float:
    a, b = spec.alpha, spec.beta
    return math.exp(
        (a + b + 1) * math.log(2.0)
        + math.lgamma(a + 1)
        + math.lgamma(b + 1)
        - math.lgamma(a + b + 2)
    )


@lru_cache(maxsize=256)
def _recurrence_cached(spec: BasisSpec, n: int):
    a, b = spec.alpha, spec.beta
    k = np.arange(n, dtype=float)
    diag = np.empty(n)
    if n:
        diag[0] = (b - a) / (a + b + 2)
    if n > 1:
        kk = k[1:]
        s = 2 * kk + a + b
        diag[1:] = (b * b - a * a) / (s * (s + 2))
    off = np.empty(n)  # off[k] couples p_k and p_{k+1}
    if n:
        off[0] = math.sqrt(4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b)))
    if n > 1:
        m = np.arange(2, n + 1, dtype=float)
        s = 2 * m + a + b
        off[1:] = np.sqrt(4 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1) * (s - 1)))
    diag.setflags(write=False)
    off.setflags(write=False)
    return diag, off


def recurrence(spec: BasisSpec, n: int):
    """Orthonormal three-term recurrence coefficients.

    Returns ``(b, a)`` with ``len(b) == len(a) == n`` such that

        x p_k = a[k] p_{k+1} + b[k] p_k + a[k-1] p_{k-1}.
    """
    return _recurrence_cached(spec, int(n))


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainError("x must lie in [-1, 1]")
    return x


def _check_degree(n):
    if int(n) != n or n < 0:
        raise DomainError("degree must be a nonnegative integer", n=n)
    return int(n)


def legendre_x_coupling(n):
    """Coefficient a_n in x P_n = a_n P_{n+1} + a_{n-1} P_{n-1} (normalized P)."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise DomainError("n must be nonnegative")
    n = n.astype(float)
    out = (n + 1) / np.sqrt((2 * n + 1) * (2 * n + 3))
    return out if out.ndim else float(out)


def _legendre_table(nmax, x):
    # classical recurrence, rescaled at the end
    P = np.empty((nmax + 1,) + x.shape)
    P[0] = 1.0
    if nmax >= 1:
        P[1] = x
    for k in range(1, nmax):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
    scale = np.sqrt(np.arange(nmax + 1) + 0.5)
    return P * scale.reshape((-1,) + (1,) * x.ndim)


def _jacobi_table(spec, nmax, x):
    b, a = recurrence(spec, nmax + 1)
    P = np.empty((nmax + 1,) + x.shape)
    P[0] = 1.0 / math.sqrt(weight_mass(spec))
    if nmax >= 1:
        P[1] = (x - b[0]) * P[0] / a[0]
    for k in range(1, nmax):
        P[k + 1] = ((x - b[k]) * P[k] - a[k - 1] * P[k - 1]) / a[k]
    return P


def basis_matrix(spec: BasisSpec, nmax: int, x, check=True):
    """Values ``B[k, i] = p_k(x_i)`` for ``k = 0..nmax``."""
    nmax = _check_degree(nmax)
    x = _check_domain(x) if check else np.asarray(x, dtype=float)
    if spec.family == "legendre":
        return _legendre_table(nmax, x)
    return _jacobi_table(spec, nmax, x)


def basis_matrix_with_derivative(spec: BasisSpec, nmax: int, x, check=True):
    """Values and first derivatives of ``p_0..p_nmax`` at ``x``.

    The derivative follows from differentiating the recurrence, so it is
    exact up to rounding (no finite differences).
    """
    nmax = _check_degree(nmax)
    x = _check_domain(x) if check else np.asarray(x, dtype=float)
    b, a = recurrence(spec, nmax + 1)
    P = np.empty((nmax + 1,) + x.shape)
    D = np.zeros_like(P)
    P[0] = 1.0 / math.sqrt(weight_mass(spec))
    if nmax >= 1:
        P[1] = (x - b[0]) * P[0] / a[0]
        D[1] = P[0] / a[0]
    for k in range(1, nmax):
        P[k + 1] = ((x - b[k]) * P[k] - a[k - 1] * P[k - 1]) / a[k]
        D[k + 1] = ((x - b[k]) * D[k] + P[k] - a[k - 1] * D[k - 1]) / a[k]
    return P, D


def eval_legendre_normalized(n, x):
    """L2[-1,1]-orthonormal Legendre polynomial of degree ``n`` at ``x``."""
    n = _check_degree(n)
    x = _check_domain(x)
    out = _legendre_table(n, x)[n]
    return float(out) if out.ndim == 0 else out


def eval_jacobi_normalized(spec: BasisSpec, n, x):
    """Jacobi polynomial of degree ``n`` with unit norm in L2(w_{a,b})."""
    n = _check_degree(n)
    x = _check_domain(x)
    out = _jacobi_table(BasisSpec.jacobi(spec.alpha, spec.beta), n, x)[n]
    return float(out) if out.ndim == 0 else out


def series_eval(spec: BasisSpec, coeffs, x, check=True):
    """Clenshaw summation of ``sum_k coeffs[k] p_k(x)``.

    ``coeffs`` may be 2-D, in which case each row is a separate series and
    the result has shape ``(len(coeffs),) + x.shape``.
    """
    x = _check_domain(x) if check else np.asarray(x, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    squeeze = c.ndim == 1
    c = np.atleast_2d(c)
    m = c.shape[1]
    b, a = recurrence(spec, m + 1)
    xs = x[None, ...]
    cc = c.reshape(c.shape + (1,) * x.ndim)
    y1 = np.zeros(c.shape[:1] + x.shape)
    y2 = np.zeros_like(y1)
    for k in range(m - 1, -1, -1):
        alpha = (xs - b[k]) / a[k]
        beta = -a[k] / a[k + 1] if k + 1 < m + 1 else 0.0
        y = cc[:, k] + alpha * y1 + beta * y2
        y2, y1 = y1, y
    out = y1 / math.sqrt(weight_mass(spec))
    return out[0] if squeeze else out


def jacobi_norm_factor(spec: BasisSpec) -> float:
    """Scale taking our unit-norm p_n to the 2**(a+b+2)-norm convention."""
    return 2.0 ** ((spec.alpha + spec.beta + 2) / 2)


@lru_cache(maxsize=128)
def _gauss_cached(spec: BasisSpec, n: int):
    b, a = recurrence(spec, n)
    if n == 1:
        nodes = np.array([b[0]])
        vec0 = np.array([1.0])
    else:
        try:
            nodes, vecs = eigh_tridiagonal(b, a[: n - 1])
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ConvergenceFailure("tridiagonal eigensolver failed in gauss_rule", n=n) from exc
        vec0 = vecs[0]
    weights = weight_mass(spec) * vec0**2
    if spec.is_symmetric:
        # enforce exact symmetry of the rule
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_rule(spec: BasisSpec, n_nodes: int) -> QuadratureRule:
    """Golub-Welsch Gauss rule for the weight of ``spec``."""
    if int(n_nodes) != n_nodes or n_nodes < 1:
        raise DomainError("n_nodes must be a positive integer", n_nodes=n_nodes)
    nodes, weights = _gauss_cached(spec, int(n_nodes))
    return QuadratureRule(nodes, weights, spec)


def default_quadrature_nodes(degree: int) -> int:
    """Node count used for degree-N work involving non-polynomial factors."""
    return 2 * int(degree) + 16
