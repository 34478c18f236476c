"""Periodic orbits of Abel equations ``x' = A(t) x**3 + B(t) x**2 + C(t) x`` on [0, 1]."""

from .coeffs import (
    ZERO,
    AbelEquation,
    MonomialPoly,
    Sampled,
    Sign,
    SignClass,
    TrigPoly,
    abel,
    constant,
    integrate_exact,
    linear_combination,
    sign_range,
    trig1,
)
from .criteria import (
    CriterionReport,
    Region,
    Witness,
    WitnessKind,
    locate_orbit,
    thm51_check,
    thm52_check,
    thm_a_check,
    witness_search_thmA,
)
from .lyapunov import (
    CenterVerdict,
    LyapunovConstants,
    design_two_orbit_poly,
    design_two_orbit_trig,
    lyapunov_constants,
)
from .perturb import PerturbationParams, predict_bifurcating_orbits, validate_against_integration
from .poincare import (
    TAU_HYP,
    OrbitRecord,
    ScanConfig,
    ScanResult,
    Stability,
    classify_zero,
    find_periodic_orbits,
    poincare_map,
    scan_periodic_orbits,
)
from .specio import SpecError, parse_spec, serialize

__version__ = "0.1.0"
