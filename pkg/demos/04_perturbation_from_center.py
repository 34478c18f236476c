"""Orbits born from the center x' = 2 pi b1 cos(2 pi t) x^2.

The first-order function What(rho) predicts which center solutions survive
a small perturbation; direct integration at eps and eps/2 checks the
prediction and its O(eps) convergence.

    python3 demos/04_perturbation_from_center.py
"""

from abel_orbits.perturb import (
    PUBLISHED_EXAMPLE,
    PerturbationParams,
    predict_bifurcating_orbits,
    reconcile,
    validate_against_integration,
)

cases = {
    "two roots": PerturbationParams(1.0, a2_tilde=-0.75, b0_tilde=0.25),
    "one root": PerturbationParams(1.0, a0_tilde=1.0, a2_tilde=-0.2, b0_tilde=0.3),
    "a0 = 0, b0 b1 - a2 = 1, a2 = 3/4": PUBLISHED_EXAMPLE,
}

eps = 1e-3
for name, p in cases.items():
    print(f"\n{name}: {p}")
    roots = predict_bifurcating_orbits(p)
    print("  predicted rho:", ", ".join(f"{r.rho:.8g}" for r in roots) or "none")
    records, found = validate_against_integration(p.with_epsilon(eps))
    print(f"  eps = {eps:g}: integration finds {len(found)} non-zero orbit(s)")
    for r in records:
        print(f"    rho {r.rho_predicted:.6g} -> x0 {r.x0_found:.6g}, gap {r.gap:.3g}, "
              f"gap(eps)/gap(eps/2) = {r.gap_ratio:.3f}")
    print("  ", reconcile(p).note)
