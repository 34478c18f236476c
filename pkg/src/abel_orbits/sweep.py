"""Random soundness sweeps: draw equations a criterion accepts and check the
orbit scanner against the promised bound."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .criteria import CriterionReport, poly3_conditions, thm_a_check, trig1_conditions
from .lyapunov import Poly3, Trig1, center_test_poly3, center_test_trig1
from .poincare import ScanConfig, ScanResult, scan_periodic_orbits

__all__ = [
    "SEED_ENV",
    "rng_from_env",
    "draw_trig1_criterion",
    "draw_poly3_criterion",
    "SoundnessOutcome",
    "SweepDraw",
    "SweepResult",
    "check_soundness",
    "criterion_sweep",
]

SEED_ENV = "ABEL_ORBITS_SEED"
DEFAULT_SEED = 20240611
MAX_REJECTIONS = 100_000


def rng_from_env(default: int = DEFAULT_SEED) -> np.random.Generator:
    """Generator seeded from ``ABEL_ORBITS_SEED`` (or ``default``)."""
    raw = os.environ.get(SEED_ENV)
    try:
        seed = default if raw in (None, "") else int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
    return np.random.default_rng(seed)


def draw_trig1_criterion(rng: np.random.Generator) -> Trig1:
    """Degree-one trigonometric coefficients with a certified closed-form
    witness and no center at the origin (rejection sampling)."""
    for _ in range(MAX_REJECTIONS):
        c = rng.normal(size=6)
        if center_test_trig1(*c):
            continue
        if trig1_conditions(*c)[3] is not None:
            return Trig1(*map(float, c))
    raise RuntimeError("rejection sampling did not converge")


def draw_poly3_criterion(rng: np.random.Generator, max_exp: int = 5) -> Poly3:
    """Three-monomial coefficients (``0 < j < k <= max_exp``) with a
    certified ratio-condition witness and no center."""
    for _ in range(MAX_REJECTIONS):
        j, k = sorted(rng.choice(np.arange(1, max_exp + 1), size=2, replace=False))
        c = rng.normal(size=6)
        if center_test_poly3(*c, int(j), int(k)):
            continue
        if poly3_conditions(*c, int(j), int(k))[3] is not None:
            return Poly3(*map(float, c), int(j), int(k))
    raise RuntimeError("rejection sampling did not converge")


@dataclass(frozen=True)
class SoundnessOutcome:
    n_orbits: int
    hyperbolic: bool
    multipliers: tuple[float, ...]

    def violates(self, report: CriterionReport) -> bool:
        if not report.applies or report.orbit_bound is None:
            return False
        if self.n_orbits > report.orbit_bound:
            return True
        return report.hyperbolic_guarantee and not self.hyperbolic


def _outcome(res: ScanResult) -> SoundnessOutcome:
    nz = res.nonzero_orbits
    return SoundnessOutcome(len(nz), all(o.hyperbolic for o in nz),
                            tuple(o.multiplier for o in nz))


def check_soundness(eq, cfg: ScanConfig | None = None) -> SoundnessOutcome:
    return _outcome(scan_periodic_orbits(eq, cfg))


@dataclass(frozen=True)
class SweepDraw:
    params: Trig1 | Poly3
    report: CriterionReport
    scan: ScanResult


@dataclass
class SweepResult:
    family: str
    draws: int
    applied: int = 0
    with_orbit: int = 0
    violations: list[dict] = field(default_factory=list)


def criterion_sweep(family: str, n: int, rng: np.random.Generator | None = None,
                    cfg: ScanConfig | None = None,
                    records: list[SweepDraw] | None = None) -> SweepResult:
    """Draw ``n`` accepted equations of ``family`` (``"trig"`` or ``"poly"``)
    and record every case where the scan contradicts the criterion.

    When ``records`` is given, one :class:`SweepDraw` per draw is appended.
    """
    if family not in ("trig", "poly"):
        raise ValueError(f"family must be 'trig' or 'poly', got {family!r}")
    if n < 1:
        raise ValueError("n must be positive")
    rng = rng_from_env() if rng is None else rng
    out = SweepResult(family, n)
    for i in range(n):
        p = draw_trig1_criterion(rng) if family == "trig" else draw_poly3_criterion(rng)
        eq = p.equation()
        rep = thm_a_check(eq)
        scan = scan_periodic_orbits(eq, cfg)
        outcome = _outcome(scan)
        if records is not None:
            records.append(SweepDraw(p, rep, scan))
        out.applied += rep.applies
        out.with_orbit += outcome.n_orbits > 0
        if outcome.violates(rep):
            out.violations.append({"index": i, "params": p, "n_orbits": outcome.n_orbits,
                                   "multipliers": outcome.multipliers})
    return out
