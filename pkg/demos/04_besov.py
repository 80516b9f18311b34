"""Besov norms built from Legendre and prolate dyadic blocks are equivalent."""
from prolate.besov import BesovParams, equivalence_experiment, hardy_inequality_check

for params in (BesovParams(0.5, 2, 2), BesovParams(1.0, 2, 1), BesovParams(0.3, 1, float("inf")),
               BesovParams(0.7, 2, 2, "nonclassical")):
    rep = equivalence_experiment(params, 3.0, supports=(32, 64))
    rows = "  ".join(f"K={r['support']}: [{r['min_ratio']:.4f}, {r['max_ratio']:.4f}]" for r in rep["rows"])
    print(f"s={params.s} p={params.p} q={params.q} {params.flavor:12s} ratio window {rows}")

rep = equivalence_experiment(BesovParams(0.5, 2, 2), 0.0, supports=(32,))
print("c = 0:", rep["rows"][0]["min_ratio"], rep["rows"][0]["max_ratio"])
print("discrete Hardy inequality, a = (1, 1/2, 1/4, ...):", hardy_inequality_check([2.0**-k for k in range(10)], 1.0, 0.5))
