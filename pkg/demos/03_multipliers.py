"""Spectral multiplier kernels: localization for smooth profiles, a sharp front for band-limited ones."""
import numpy as np

from prolate import MultiplierProfile, eval_multiplier_kernel, theta_grid
from prolate.functional import verify_finite_speed, verify_multiplier_localization

for prof in (MultiplierProfile.gaussian(), MultiplierProfile.bump(2.0)):
    rep = verify_multiplier_localization(prof, [1.0, 0.5, 0.25], [3, 8], "prolate", 1.0, n_grid=41)
    print(prof.to_dict())
    for r in rep["rows"]:
        print(f"  delta={r['delta']:.2f} sigma={r['sigma']}  c_sigma={r['c_sigma']:.4g}  refined={r['c_sigma_refined']:.4g}")

# Fejer profile: its Fourier transform lives in [-2, 2], so the kernel front sits at rho = 2 delta
for delta in (0.5, 0.25):
    rep = verify_finite_speed(MultiplierProfile.fejer(2.0), delta, "prolate", 1.0, n_grid=241, n_terms=1200)
    print(f"\nFejer delta={delta}: max|K| inside front {rep['max_inside']:.3e}, beyond {rep['max_outside']:.3e}")
    for a, b, m in rep["decay_profile"][::3]:
        print(f"  rho in [{a:.2f}, {b:.2f}): max|K| = {m:.2e}")

x = theta_grid(9)
K = eval_multiplier_kernel(MultiplierProfile.gaussian(), 0.3, "prolate", x, x, 1.0, derivative="D")
print("\nD_x kernel row at x=1 (vanishes at the endpoint):", np.round(K.values[0], 6))
