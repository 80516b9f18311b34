"""Finite-dimensional semigroup perturbation experiments.

A generator Z (a weighted graph Laplacian plus a nonnegative diagonal) and
a potential V >= 0 give S_t = exp(-tZ) and T_t = exp(-t(Z + diag V)).  The
checks here are the entrywise sandwich

    exp(-t max V) S_t <= T_t <= S_t,

the variation-of-parameters identity T_t = S_t - int_0^t S_{t-s} V T_s ds,
and the transfer of Lipschitz bounds from S_t to T_t on a path graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DomainError, SandwichViolation

__all__ = [
    "PerturbationInstance",
    "heat_matrix",
    "graph_laplacian",
    "random_instance",
    "path_graph_instance",
    "verify_sandwich",
    "variation_of_parameters_residual",
    "variation_of_parameters_converged",
    "verify_holder_transfer",
    "fuzz_sandwich",
]

SANDWICH_EPS = 1e-12


def heat_matrix(G, t):
    """exp(-t G) for symmetric G via the symmetric eigendecomposition."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DomainError("G must be square")
    if not np.allclose(G, G.T, atol=1e-13, rtol=0):
        raise DomainError("G must be symmetric")
    if t < 0:
        raise DomainError("t must be nonnegative", t=t)
    if t == 0:
        return np.eye(len(G))
    try:
        w, U = np.linalg.eigh(0.5 * (G + G.T))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure("symmetric eigensolver failed") from exc
    E = (U * np.exp(-t * w)) @ U.T
    return 0.5 * (E + E.T)


def graph_laplacian(W):
    """Laplacian diag(W 1) - W of a symmetric nonnegative weight matrix."""
    W = np.asarray(W, dtype=float)
    W = W - np.diag(np.diag(W))
    return np.diag(W.sum(axis=1)) - W


@dataclass(frozen=True)
class PerturbationInstance:
    """Generator Z, potential V >= 0 and optional vertex positions.

    ``scale`` is the vertex measure used to turn matrix entries into
    kernel densities (K / scale), 1 for plain graphs.
    """

    Z: np.ndarray
    V: np.ndarray
    positions: np.ndarray | None = None
    scale: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if Z.ndim != 2 or Z.shape[0] != Z.shape[1] or V.shape != (Z.shape[0],):
            raise DomainError("shape mismatch between Z and V")
        if np.max(np.abs(Z - Z.T), initial=0.0) > 1e-13 * max(1.0, np.abs(Z).max()):
            raise DomainError("Z must be symmetric")
        if np.linalg.eigvalsh(Z).min() < -1e-12 * max(1.0, np.abs(Z).max()):
            raise DomainError("Z must be positive semidefinite")
        if np.any(V < 0):
            raise DomainError("V must be nonnegative")

    @property
    def dim(self):
        return len(self.V)

    @property
    def Y(self):
        return self.Z + np.diag(self.V)

    def is_dirichlet(self, tol=1e-13):
        """Off-diagonal entries <= 0 and row sums >= 0."""
        Z = np.asarray(self.Z)
        off = Z - np.diag(np.diag(Z))
        return bool(np.all(off <= tol) and np.all(Z.sum(axis=1) >= -tol * max(1.0, np.abs(Z).max())))

    def to_dict(self):
        return {
            "dim": self.dim,
            "seed": self.seed,
            "scale": repr(float(self.scale)),
            "Z": [[repr(float(v)) for v in row] for row in self.Z],
            "V": [repr(float(v)) for v in self.V],
            "positions": None if self.positions is None else [repr(float(v)) for v in self.positions],
        }

    @classmethod
    def from_dict(cls, doc):
        pos = doc.get("positions")
        return cls(
            np.array([[float(v) for v in row] for row in doc["Z"]]),
            np.array([float(v) for v in doc["V"]]),
            None if pos is None else np.array([float(v) for v in pos]),
            float(doc.get("scale", "1.0")),
            doc.get("seed"),
        )


def random_instance(rng, dim=None, max_dim=8, killing=True):
    """Random weighted graph Laplacian (+ optional killing diagonal) with V in [0,1]^dim."""
    if dim is None:
        dim = int(rng.integers(2, max_dim + 1))
    W = rng.uniform(0, 1, (dim, dim)) * (rng.uniform(0, 1, (dim, dim)) < 0.6)
    W = np.triu(W, 1)
    W = W + W.T
    Z = graph_laplacian(W)
    if killing:
        Z = Z + np.diag(rng.uniform(0, 0.5, dim) * (rng.uniform(0, 1, dim) < 0.3))
    V = rng.uniform(0, 1, dim)
    return PerturbationInstance(Z, V)


def path_graph_instance(dim, potential, length=1.0):
    """Discrete Neumann Laplacian on ``dim`` cells of [0, length].

    ``potential`` is a callable sampled at the cell centres.  Entries of
    the heat matrices divided by the cell width approximate the continuous
    kernel, so fits are comparable across refinements.
    """
    h = length / dim
    W = np.zeros((dim, dim))
    i = np.arange(dim - 1)
    W[i, i + 1] = W[i + 1, i] = 1.0 / h**2
    pos = (np.arange(dim) + 0.5) * h
    V = np.asarray(potential(pos), dtype=float)
    return PerturbationInstance(graph_laplacian(W), V, pos, h)


def verify_sandwich(inst: PerturbationInstance, t_grid, eps=SANDWICH_EPS, raise_on_violation=True):
    """Entrywise exp(-t max V) K_S - eps <= K_T <= K_S + eps for each t."""
    if not inst.is_dirichlet():
        raise DomainError("instance lacks the Dirichlet sign structure")
    vmax = float(np.max(inst.V)) if inst.dim else 0.0
    worst_lo = worst_hi = math.inf
    for t in t_grid:
        KS = heat_matrix(inst.Z, t)
        KT = heat_matrix(inst.Y, t)
        lo = KT - (math.exp(-t * vmax) * KS - eps)
        hi = KS + eps - KT
        for slack, side in ((lo, "lower"), (hi, "upper")):
            i, j = np.unravel_index(np.argmin(slack), slack.shape)
            if slack[i, j] < 0 and raise_on_violation:
                raise SandwichViolation(
                    f"{side} sandwich bound violated", t=float(t), i=int(i), j=int(j),
                    K_T=float(KT[i, j]), K_S=float(KS[i, j]), seed=inst.seed,
                )
        # slacks reported relative to the exact bounds (without eps)
        worst_lo = min(worst_lo, float(np.min(lo)) - eps)
        worst_hi = min(worst_hi, float(np.min(hi)) - eps)
    return {"worst_lower_slack": worst_lo, "worst_upper_slack": worst_hi, "dim": inst.dim, "seed": inst.seed}


def _composite_gauss(t, n_quad, nodes_per_panel):
    if nodes_per_panel is None:
        panels = 4
        m = max(1, n_quad // panels)
    else:
        m = int(nodes_per_panel)
        panels = max(1, n_quad // m)
    g, w = np.polynomial.legendre.leggauss(m)
    edges = np.linspace(0.0, t, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    s = (mid[:, None] + half[:, None] * g).ravel()
    ws = (half[:, None] * w).ravel()
    return s, ws


def variation_of_parameters_residual(inst: PerturbationInstance, t, n_quad, nodes_per_panel=None):
    """max-norm of T_t - S_t + int_0^t S_{t-s} diag(V) T_s ds.

    The s-integral uses composite Gauss-Legendre: by default 4 panels of
    n_quad/4 nodes; with ``nodes_per_panel`` fixed, n_quad/nodes_per_panel
    panels (which exposes the algebraic order 2*nodes_per_panel).
    """
    if n_quad < 8:
        raise DomainError("n_quad must be at least 8", n_quad=n_quad)
    wz, Uz = np.linalg.eigh(inst.Z)
    wy, Uy = np.linalg.eigh(inst.Y)
    S = lambda s: (Uz * np.exp(-s * wz)) @ Uz.T  # noqa: E731
    T = lambda s: (Uy * np.exp(-s * wy)) @ Uy.T  # noqa: E731
    s_nodes, weights = _composite_gauss(t, n_quad, nodes_per_panel)
    acc = np.zeros_like(inst.Z, dtype=float)
    for s, w in zip(s_nodes, weights):
        acc += w * (S(t - s) * inst.V) @ T(s)
    return float(np.max(np.abs(T(t) - S(t) + acc)))


def variation_of_parameters_converged(inst, t, start=16, max_doublings=8):
    """Double the node count until the residual stops decreasing; return (residual, n_quad)."""
    n = start
    best = variation_of_parameters_residual(inst, t, n)
    for _ in range(max_doublings):
        nxt = variation_of_parameters_residual(inst, t, 2 * n)
        if nxt >= 0.5 * best:
            return min(best, nxt), 2 * n
        best, n = nxt, 2 * n
    return best, n


def _gaussian_envelope_1d(pos, t, length, c_env):
    st = math.sqrt(t)
    V = np.minimum(pos + st, length) - np.maximum(pos - st, 0.0)
    rho = np.abs(np.subtract.outer(pos, pos))
    return np.exp(-rho**2 / (c_env * t)) / np.sqrt(np.outer(V, V))


def verify_holder_transfer(inst: PerturbationInstance, t_grid, length=1.0, c_env=8.0, use_potential=True):
    """Smallest C in |K(x,.) - K(x',.)| <= C (1 + t max V) (rho/sqrt t) env over pairs rho <= sqrt t.

    K is the kernel density (matrix entries / cell width) of T_t (or of
    S_t with ``use_potential=False``); env is the 1-D Gaussian envelope
    exp(-rho^2/(c_env t)) / sqrt(V(x,sqrt t) V(y,sqrt t)).
    """
    from .heat import lipschitz_fit

    if inst.positions is None:
        raise DomainError("instance needs vertex positions")
    pos = np.asarray(inst.positions)
    vmax = float(np.max(inst.V)) if use_potential else 0.0
    best = 0.0
    for t in t_grid:
        G = inst.Y if use_potential else inst.Z
        K = heat_matrix(G, t) / inst.scale
        env = _gaussian_envelope_1d(pos, t, length, c_env)
        noise = 1e-12 * np.max(np.abs(K))
        C = lipschitz_fit(K, pos, math.sqrt(t), env, noise) / (1 + t * vmax)
        best = max(best, C)
    return {"C": best, "dim": inst.dim, "t_grid": [float(t) for t in t_grid], "vmax": vmax}


def fuzz_sandwich(n_instances=200, seed=0, t_grid=(0.01, 0.1, 1.0, 10.0), max_dim=8):
    """Run verify_sandwich over random instances; returns the worst slacks."""
    rng = np.random.default_rng(seed)
    worst_lo = worst_hi = math.inf
    for k in range(n_instances):
        inst = random_instance(rng, max_dim=max_dim)
        inst = PerturbationInstance(inst.Z, inst.V, seed=seed * 100003 + k)
        rep = verify_sandwich(inst, t_grid)
        worst_lo = min(worst_lo, rep["worst_lower_slack"])
        worst_hi = min(worst_hi, rep["worst_upper_slack"])
    return {"n_instances": n_instances, "seed": seed, "worst_lower_slack": worst_lo, "worst_upper_slack": worst_hi}
