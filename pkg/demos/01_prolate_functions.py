"""Prolate functions: eigenvalues, closeness to Legendre, and the Fourier eigenrelation."""
import math

import numpy as np

from prolate import LEGENDRE, ProlateProblem, basis_matrix, solve_eigensystem, theta_grid
from prolate.pswf import bracket_margins, fourier_eigenvalue, proximity_bound, sinc_eigenvalue

for c in (0.5, 1.0, 5.0, 10.0):
    dec = solve_eigensystem(ProlateProblem.for_n_max(c, 100), 100)
    lo, hi = bracket_margins(dec)
    print(f"c={c:5.1f}  N={dec.N:4d}  chi_0={dec.chis[0]:.12f}  min gap to n(n+1): {lo.min():.3e}"
          f"  to n(n+1)+c^2: {hi.min():.3e}")

# psi_n approaches the normalized Legendre polynomial as n grows
c = 1.0
dec = solve_eigensystem(ProlateProblem.for_n_max(c, 60), 60)
x = theta_grid(2001)
err = np.abs(dec.evaluate(x) - basis_matrix(LEGENDRE, 60, x)).max(axis=1)
for n in (0, 5, 20, 60):
    print(f"n={n:2d}  sup|psi_n - P_n| = {err[n]:.3e}   bound 2c^2/sqrt(n+1/2) = {proximity_bound(c, n):.3e}")

# finite Fourier transform eigenvalues: phase i^n, magnitudes falling off past 2c/pi
c = 5.0
dec = solve_eigensystem(ProlateProblem.for_n_max(c, 10), 10)
print(f"\nc={c}: 2c/pi = {2 * c / math.pi:.2f}")
for n in range(11):
    lam, res = fourier_eigenvalue(dec.function(n))
    mu, _ = sinc_eigenvalue(dec.function(n))
    print(f"n={n:2d}  |lambda|={abs(lam):.6e}  phase/i^n={lam / abs(lam) / 1j**n:.1e}  mu={mu:.10f}  residual={res:.1e}")
