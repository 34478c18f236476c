"""Certify uniqueness with a witness, predict where the orbit lives, and
compare with what the scanner finds.

    python3 demos/02_uniqueness_criteria.py
"""

from abel_orbits import abel, trig1
from abel_orbits.criteria import thm52_check, thm_a_check
from abel_orbits.poincare import scan_periodic_orbits

examples = {
    # A = 2 + cos, B = 5 cos: A alone is positive
    "A definite": abel(trig1(2.0, 1.0), trig1(0.0, 5.0)),
    # neither coefficient is definite, a combination is
    "mixed witness": abel(trig1(0.5, 1.0), trig1(0.5, -1.0)),
    # A = 2, B = -1: an orbit between 0 and a/b, guaranteed to exist
    "guaranteed orbit": abel(2.0, -1.0),
}

for name, eq in examples.items():
    rep = thm_a_check(eq)
    print(f"\n{name}")
    if not rep.applies:
        print("  criterion does not apply:", "; ".join(rep.notes))
        continue
    w = rep.witness
    print(f"  witness a = {w.a:.6g}, b = {w.b:.6g} ({w.kind.value}), "
          f"a A + b B {rep.sign_evidence.sign.value}")
    if rep.location is not None:
        print("  predicted region:", rep.location.describe())
    found = scan_periodic_orbits(eq).nonzero_orbits
    print(f"  scan: {len(found)} non-zero orbit(s)",
          ", ".join(f"x0 = {o.x0:.8g} ({o.stability.value})" for o in found))

# with a linear term the three-constant criterion allows up to four orbits
eq = abel(1.0, 0.0, trig1(0.0, 0.5))
rep = thm52_check(eq, 1.0, 0.0, 0.5)
print("\nlinear term, constants (1, 0, 0.5):", "applies" if rep.applies else "fails",
      f"(max of the quadratic expression {rep.details['max_expression']:.4g})")
