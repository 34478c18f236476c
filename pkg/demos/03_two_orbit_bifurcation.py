"""Build equations whose zero solution sheds two small hyperbolic orbits.

The orbits sit near the roots of lambda - mu x + V4 x^2, so they only exist
when mu^2 > 4 lambda V4.  The first pair of designs below sits on the
boundary of the admissible hierarchy and has no real roots; the second pair
has room for both.

    python3 demos/03_two_orbit_bifurcation.py
"""

import math

from abel_orbits.lyapunov import design_two_orbit_poly, design_two_orbit_trig, lyapunov_constants
from abel_orbits.poincare import scan_periodic_orbits


def report(label, eq):
    c = lyapunov_constants(eq)
    disc = (-c.v3) ** 2 - 4 * c.v2 * c.v4
    print(f"\n{label}")
    print(f"  V2 = {c.v2:.4g}, V3 = {c.v3:.4g}, V4 = {c.v4:.4g}, mu^2 - 4 lambda V4 = {disc:.3g}")
    if disc > 0:
        r = math.sqrt(disc)
        print(f"  predicted small orbits near x = {(-c.v3 - r) / (2 * c.v4):.4g}, "
              f"{(-c.v3 + r) / (2 * c.v4):.4g}")
    for o in scan_periodic_orbits(eq).nonzero_orbits:
        print(f"  found x0 = {o.x0:.6g}, multiplier {o.multiplier:.8g} ({o.stability.value})")


report("trig, V4 = 1, mu = 1e-2, lambda = 1e-4", design_two_orbit_trig(1.0, 1e-2, 1e-4))
report("poly j=1 k=2, V4 = 2, mu = 1e-2, lambda = 1e-4",
       design_two_orbit_poly(1, 2, 2.0, 1e-2, 1e-4))
report("trig, V4 = 100, mu = 1, lambda = 2e-3", design_two_orbit_trig(100.0, 1.0, 2e-3))
report("poly j=1 k=2, V4 = 100, mu = 1, lambda = 2e-3",
       design_two_orbit_poly(1, 2, 100.0, 1.0, 2e-3))
