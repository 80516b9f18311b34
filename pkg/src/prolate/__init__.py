"""Prolate spheroidal wave functions, their heat kernels and smoothness spaces.

Submodules: orthopoly, geometry, pswf, heat, perturbation, functional,
besov, extensions, io, cli.  The most used names are re-exported here.
"""
from .errors import (
    ConvergenceFailure,
    DimensionUnsupported,
    DomainError,
    FitDegenerate,
    InterlacingViolation,
    PotentialNegative,
    ProlateError,
    QuadratureInsufficient,
    ResolutionInsufficient,
    SandwichViolation,
    TruncationInsufficient,
    VerificationFailure,
)
from .geometry import ball_measure, rho, theta, theta_grid
from .orthopoly import LEGENDRE, BasisSpec, basis_matrix, eval_legendre_normalized, gauss_rule
from .pswf import ProlateProblem, SpectralDecomposition, eval_prolate, solve_eigensystem
from .heat import eval_heat_kernel, fit_gaussian_envelope, prolate_decomposition, verify_pswf_sandwich
from .perturbation import PerturbationInstance, verify_sandwich
from .functional import MultiplierProfile, eval_multiplier_kernel
from .besov import BesovParams, DistributionCoeffs, DyadicWindowPair, besov_norm, tl_norm
from .extensions import BallProblem, JacobiPerturbationProblem, Potential, ball_eigenvalues, solve_jacobi_perturbed

__all__ = [
    "ConvergenceFailure",
    "DimensionUnsupported",
    "DomainError",
    "FitDegenerate",
    "InterlacingViolation",
    "PotentialNegative",
    "ProlateError",
    "QuadratureInsufficient",
    "ResolutionInsufficient",
    "SandwichViolation",
    "TruncationInsufficient",
    "VerificationFailure",
    "ball_measure",
    "rho",
    "theta",
    "theta_grid",
    "LEGENDRE",
    "BasisSpec",
    "basis_matrix",
    "eval_legendre_normalized",
    "gauss_rule",
    "ProlateProblem",
    "SpectralDecomposition",
    "eval_prolate",
    "solve_eigensystem",
    "eval_heat_kernel",
    "fit_gaussian_envelope",
    "prolate_decomposition",
    "verify_pswf_sandwich",
    "PerturbationInstance",
    "verify_sandwich",
    "MultiplierProfile",
    "eval_multiplier_kernel",
    "BesovParams",
    "DistributionCoeffs",
    "DyadicWindowPair",
    "besov_norm",
    "tl_norm",
    "BallProblem",
    "JacobiPerturbationProblem",
    "Potential",
    "ball_eigenvalues",
    "solve_jacobi_perturbed",
    "__version__",
]

__version__ = "0.1.0"
