"""Locate the periodic orbits of one Abel equation and compute each
multiplier three ways.

    python3 demos/01_orbits_and_multipliers.py
"""

from abel_orbits import abel, trig1
from abel_orbits.integrate import solve_with_variation
from abel_orbits.poincare import (
    multiplier_by_finite_difference,
    multiplier_by_formula,
    scan_periodic_orbits,
)

# x' = (1 + cos 2 pi t) x^3 + (-1.5 + sin 2 pi t) x^2
eq = abel(trig1(1.0, 1.0, 0.0), trig1(-1.5, 0.0, 1.0))

res = scan_periodic_orbits(eq)
print(f"scan of [{res.x0[0]:g}, {res.x0[-1]:g}] on {len(res.x0)} nodes")
print(f"escaped initial conditions: {int((res.status != 0).sum())}")
for w in res.warnings:
    print("warning:", w)

for o in res.orbits:
    print(f"\norbit x0 = {o.x0:.12g}  ({o.stability.value})")
    if o.x0 == 0.0:
        continue
    var = solve_with_variation(eq, o.x0, 1e-13, 1e-14).v1
    print(f"  variational      {var:.12g}")
    print(f"  exp(int h_x)     {multiplier_by_formula(eq, o):.12g}")
    print(f"  centred FD       {multiplier_by_finite_difference(eq, o.x0):.12g}")
