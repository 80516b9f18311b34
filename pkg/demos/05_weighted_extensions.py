"""Jacobi operators with a potential, and prolate functions on the ball."""
from prolate.extensions import (
    BallProblem,
    JacobiPerturbationProblem,
    Potential,
    ball_eigenvalues,
    ball_sandwich_diagonal,
    verify_ball_brackets,
    verify_interlacing,
)

for a, b in ((0.0, 0.0), (0.5, 0.5), (0.5, -0.3)):
    for name, V in (("4x^2", Potential.quadratic(2.0)), ("const 1.5", Potential.constant(1.5)),
                    ("x^4", Potential.polynomial((0, 0, 0, 0, 1.0)))):
        rep = verify_interlacing(JacobiPerturbationProblem(a, b, V), 60)
        print(f"alpha={a:4.1f} beta={b:4.1f} V={name:9s}  min(chi-lambda)={rep['min_lower_gap']:.3e}"
              f"  min(lambda+supV-chi)={rep['min_upper_gap']:.3e}")

tab = ball_eigenvalues(BallProblem(3, 1.0, 3.0, 4, 3))
print("\nball d=3 gamma=1 c=3, chi[n, k] - lambda_{n+2k}:")
for n in range(5):
    print("  n=%d " % n + "  ".join(f"{tab.chi[n, k] - tab.lam[n, k]:.4f}" for k in range(4)))
print(verify_ball_brackets(tab))
rep = ball_sandwich_diagonal(2, 0.5, 1.0, [0.2])
print("diameter-slice sandwich d=2:", rep["passed"], rep["worst_lower_slack"], rep["worst_upper_slack"])
