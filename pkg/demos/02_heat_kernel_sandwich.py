"""The prolate heat kernel sits between e^{-tc^2} and 1 times the Legendre heat kernel."""
import numpy as np

from prolate import eval_heat_kernel, fit_gaussian_envelope, theta_grid, verify_pswf_sandwich
from prolate.heat import row_integrals

x = theta_grid(41)
for c in (1.0, 3.0):
    rep = verify_pswf_sandwich(c, [0.01, 0.05, 0.1, 0.5, 1.0], x)
    print(f"c={c}: sandwich holds on 41x41 x 5 times;  min ratio/e^(-tc^2) = {rep['min_ratio_over_exp']:.6f},"
          f"  max ratio = {rep['max_ratio']:.6f}")

K0 = eval_heat_kernel("legendre", 0.1, x, x)
Kc = eval_heat_kernel("prolate", 0.1, x, x, c=3.0)
print(f"\nt=0.1, c=3: diagonal ratio p_t/K_0 ranges over [{np.min(np.diag(Kc.values) / np.diag(K0.values)):.4f}, "
      f"{np.max(np.diag(Kc.values) / np.diag(K0.values)):.4f}]  (e^(-tc^2) = {np.exp(-0.9):.4f})")
print(f"series terms used: {Kc.n_terms},  certified tail: {Kc.series_tail_bound:.2e}")

print("\nrow integrals at t=0.1: Legendre (Markov) vs prolate c=2 (defect)")
print("  legendre max|1 - int K|:", float(np.max(np.abs(row_integrals('legendre', 0.1, x) - 1))))
print("  prolate  max int p_t   :", float(np.max(row_integrals('prolate', 0.1, x, c=2.0))))

for kind in ("legendre", "prolate"):
    fit = fit_gaussian_envelope(kind, [0.05, 0.1, 0.2], 41, 1.0)
    print(f"\n{kind} Gaussian envelope (outer fit): c1={fit.c1:.3f} c2={fit.c2:.3f} c3={fit.c3:.3f} c4={fit.c4:.3f}")
