"""Uniqueness criteria for non-zero periodic orbits and their witnesses.

The central test: if ``a A + b B`` keeps a sign on [0, 1] without vanishing
identically (``C = 0``), the Abel equation has at most one non-zero periodic
orbit and that orbit is hyperbolic.  This module finds such ``(a, b)``
(exactly for the two closed-form families, by an angular search otherwise),
predicts where the orbit lies, and handles the zero-mean linear term and the
three-constant extension that bounds the count by four.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .coeffs import (
    ZERO_TOL,
    AbelEquation,
    CoefficientFunction,
    MonomialPoly,
    Sampled,
    Sign,
    SignClass,
    TrigPoly,
    abel,
    linear_combination,
    sign_range,
)
from .lyapunov import (
    Poly3,
    Trig1,
    center_test_poly3,
    center_test_trig1,
    poly3_coefficients,
    trig1_coefficients,
)

__all__ = [
    "WitnessKind",
    "Witness",
    "DulacData",
    "Region",
    "CriterionReport",
    "mw_evaluate",
    "certify_witness",
    "witness_search_thmA",
    "thm_a_check",
    "trig1_conditions",
    "trig1_q_feasible",
    "poly3_conditions",
    "corollary_periodic_ends",
    "thm51_transform",
    "thm51_check",
    "thm52_expression",
    "thm52_check",
    "locate_orbit",
    "no_orbit_test_trig1",
]

N_ANGLES = 256
THETA_TOL = 1e-10
THM51_NODES = 1025
THM52_GRID = 4097
THM52_MARGIN = 1e-10
MEAN_TOL = 1e-10


class WitnessKind(enum.Enum):
    THM_A = "thm_a"
    THM_B_COND1 = "thm_b_cond1"
    THM_B_COND2 = "thm_b_cond2"
    THM_B_COND3 = "thm_b_cond3"
    THM_C_COND1 = "thm_c_cond1"
    THM_C_COND2 = "thm_c_cond2"
    THM_C_COND3 = "thm_c_cond3"
    PROP28_A_ONLY = "prop28_a_only"
    PROP28_B_ONLY = "prop28_b_only"
    THM51 = "thm51"
    THM52 = "thm52"
    SEPARABLE = "separable"


@dataclass(frozen=True)
class Witness:
    """Constants making ``a A + b B`` sign-definite (``c`` only for the
    three-constant criterion)."""

    a: float
    b: float
    kind: WitnessKind
    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True)
class DulacData:
    """A time-independent polynomial ``f(x)`` (increasing powers) and exponent ``w``."""

    f_coeffs: tuple[float, ...]
    w: float = -1.0

    def __post_init__(self):
        object.__setattr__(self, "f_coeffs", tuple(float(c) for c in self.f_coeffs))
        if self.w == 0:
            raise ValueError("w must be non-zero")

    @classmethod
    def thm_a(cls, a: float, b: float) -> "DulacData":
        """``f = x**2 (b x - a)``."""
        return cls((0.0, 0.0, -a, b), -1.0)

    @classmethod
    def thm52(cls, a: float, b: float, c: float) -> "DulacData":
        """``f = b x**3 - a x**2 + c x``."""
        return cls((0.0, c, -a, b), -1.0)


def mw_evaluate(eq: AbelEquation, d: DulacData, t, x):
    """``f'(x) h(t, x) + w f(x) h_x(t, x)``.

    Coefficients of each power of ``x`` are collected before evaluation, so
    terms that cancel identically (the ``x**5`` terms for the standard
    choices of ``f``) do not cost relative accuracy at large ``|x|``.
    """
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    A, B, C = (np.asarray(g(t), dtype=float) for g in (eq.A, eq.B, eq.C))
    h = [np.zeros_like(A), C, B, A]
    h_x = [C, 2.0 * B, 3.0 * A]
    f = d.f_coeffs
    fp = np.polynomial.polynomial.polyder(f)
    coeffs = [np.zeros_like(A) for _ in range(len(f) + 3)]
    for i, fi in enumerate(fp):
        for j, hj in enumerate(h):
            coeffs[i + j] = coeffs[i + j] + fi * hj
    for i, fi in enumerate(f):
        for j, hj in enumerate(h_x):
            coeffs[i + j] = coeffs[i + j] + d.w * fi * hj
    out = np.zeros_like(A)
    for c in reversed(coeffs):
        out = out * x + c
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Region:
    """Open interval ``(lo, hi)`` predicted to hold the non-zero orbit.

    ``case`` names the branch in the normalised frame (``"i"``, ``"ii"``,
    ``"iii"``) or ``"none"`` when no non-zero orbit can exist, in which case
    the interval is empty.
    """

    lo: float
    hi: float
    case: str
    guaranteed: bool = False
    flipped_x: bool = False
    flipped_t: bool = False

    @property
    def empty(self) -> bool:
        return self.case == "none"

    def contains(self, x: float) -> bool:
        return (not self.empty) and self.lo < x < self.hi

    def describe(self) -> str:
        if self.empty:
            return "no non-zero periodic orbit"
        lo = "-inf" if math.isinf(self.lo) else f"{self.lo:.12g}"
        hi = "inf" if math.isinf(self.hi) else f"{self.hi:.12g}"
        tail = " (always exists)" if self.guaranteed else ""
        return f"{lo} < x < {hi}{tail}"


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    applies: bool
    witness: Witness | None = None
    sign_evidence: SignClass | None = None
    orbit_bound: int | None = None
    hyperbolic_guarantee: bool = False
    location: Region | None = None
    notes: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# certification


def _combination(eq: AbelEquation, a: float, b: float) -> CoefficientFunction:
    return linear_combination(a, eq.A, b, eq.B)


def certify_witness(eq: AbelEquation, a: float, b: float) -> SignClass:
    """Sign class of ``a A + b B``."""
    return sign_range(_combination(eq, a, b))


def _certified(sc: SignClass) -> bool:
    return sc.definite


def _rel_tol(*vals: float) -> float:
    return ZERO_TOL * max(1.0, sum(abs(v) for v in vals)) ** 2


# ---------------------------------------------------------------------------
# degree-one trigonometric family


def trig1_conditions(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float):
    """The three closed-form conditions and a witness for the first that holds.

    Returns ``(cond_a, cond_b, cond_mixed, witness)``.  ``cond_a`` gives
    ``(1, 0)``, ``cond_b`` gives ``(0, 1)``; when only the mixed condition
    holds the witness is ``(-1, m)`` with ``m`` maximising
    ``q(m) = L m**2 - 2 P m + Q``.  The witness is ``None`` when no condition
    holds or when its combination vanishes identically.
    """
    tol = _rel_tol(a0, a1, a2, b0, b1, b2)
    cond_a = a0 * a0 >= a1 * a1 + a2 * a2 - tol
    cond_b = b0 * b0 >= b1 * b1 + b2 * b2 - tol
    mixed_lhs = (a2 * b0 - a0 * b2) ** 2 + (a0 * b1 - a1 * b0) ** 2
    cross = a2 * b1 - a1 * b2
    cond_mixed = mixed_lhs >= cross * cross - tol
    eq = Trig1(a0, a1, a2, b0, b1, b2).equation()
    candidates = []
    if cond_a:
        candidates.append(Witness(1.0, 0.0, WitnessKind.THM_B_COND1))
    if cond_b:
        candidates.append(Witness(0.0, 1.0, WitnessKind.THM_B_COND2))
    if cond_mixed:
        m = _trig1_best_m(a0, a1, a2, b0, b1, b2)
        if m is not None:
            candidates.append(Witness(-1.0, m, WitnessKind.THM_B_COND3))
    witness = None
    for w in candidates:
        if _certified(certify_witness(eq, w.a, w.b)):
            witness = w
            break
    return cond_a, cond_b, cond_mixed, witness


def _trig1_lpq(a0, a1, a2, b0, b1, b2):
    L = b0 * b0 - b1 * b1 - b2 * b2
    P = a0 * b0 - a1 * b1 - a2 * b2
    Q = a0 * a0 - a1 * a1 - a2 * a2
    return L, P, Q


def _trig1_best_m(a0, a1, a2, b0, b1, b2) -> float | None:
    L, P, Q = _trig1_lpq(a0, a1, a2, b0, b1, b2)
    if L < 0:
        return P / L
    if L == 0:
        if P != 0:
            # q is linear; step past its root on the increasing side
            r = Q / (2 * P)
            return r - math.copysign(1.0, P) * max(1.0, abs(r))
        return 0.0 if Q >= 0 else None
    # L > 0: q grows without bound; take a point beyond both roots
    disc = P * P - L * Q
    return (P + math.sqrt(max(disc, 0.0))) / L + 1.0


def trig1_q_feasible(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float) -> bool:
    """Whether some direction ``(-1, m)`` or ``(0, 1)`` makes the amplitude
    inequality hold, decided directly from ``q`` rather than the three
    displayed conditions."""
    tol = _rel_tol(a0, a1, a2, b0, b1, b2)
    L, P, Q = _trig1_lpq(a0, a1, a2, b0, b1, b2)
    if L >= -tol:
        return True
    return P * P - L * Q >= -tol * max(1.0, abs(L))


def no_orbit_test_trig1(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float) -> bool:
    """Strict inequalities under which no non-zero periodic orbit exists."""
    strict = a0 * a0 > a1 * a1 + a2 * a2 or b0 * b0 > b1 * b1 + b2 * b2
    mixed_lhs = (a2 * b0 - a0 * b2) ** 2 + (a0 * b1 - a1 * b0) ** 2
    cross = a2 * b1 - a1 * b2
    return bool(strict and mixed_lhs < cross * cross)


# ---------------------------------------------------------------------------
# three-monomial family


def _two_term_sign(alpha: float, beta: float, tol: float) -> Sign:
    """Sign of ``alpha + beta * s`` for ``s`` in [0, 1] (``s = t**m``)."""
    lo, hi = sorted((alpha, alpha + beta))
    if max(abs(lo), abs(hi)) <= tol:
        return Sign.IDENTICALLY_ZERO
    if lo >= -tol:
        return Sign.NON_NEGATIVE
    if hi <= tol:
        return Sign.NON_POSITIVE
    return Sign.CHANGES_SIGN


def _ratio_condition(num: float, den: float, tol: float) -> tuple[bool, str]:
    if abs(den) <= tol:
        return True, "denominator vanishes"
    r = num / den
    if -1.0 < r < 0.0:
        return False, f"ratio {r:.6g} in (-1, 0)"
    if r == -1.0 or r == 0.0:
        return True, f"ratio {r:g} on the boundary of (-1, 0), counted as outside"
    return True, f"ratio {r:.6g} outside (-1, 0)"


def poly3_conditions(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float,
                     j: int, k: int):
    """The three ratio conditions and a certified witness.

    Returns ``(cond1, cond2, cond3, witness)``.  Witness candidates are
    ``(-b2, a2)``, ``(-b1, a1)`` and ``(-b0, a0)``; each turns ``a A + b B``
    into a two-term function whose sign is decided from its values at
    ``t = 0`` and ``t = 1``.
    """
    tol = _rel_tol(a0, a1, a2, b0, b1, b2)
    d1 = a2 * b1 - a1 * b2
    d3 = a0 * b2 - a2 * b0
    c1, _ = _ratio_condition(a2 * b0 - a0 * b2, d1, tol)
    c2, _ = _ratio_condition(a1 * b0 - a0 * b1, -d1, tol)
    c3, _ = _ratio_condition(a0 * b1 - a1 * b0, d3, tol)
    # (alpha, beta) of the surviving two-term function for each witness
    terms = [
        (c1, (-b2, a2), (a2 * b0 - a0 * b2, d1), WitnessKind.THM_C_COND1),
        (c2, (-b1, a1), (a1 * b0 - a0 * b1, a1 * b2 - a2 * b1), WitnessKind.THM_C_COND2),
        (c3, (-b0, a0), (a0 * b1 - a1 * b0, d3), WitnessKind.THM_C_COND3),
    ]
    witness = None
    for ok, (wa, wb), (alpha, beta), kind in terms:
        if ok and _two_term_sign(alpha, beta, tol) in (Sign.NON_NEGATIVE, Sign.NON_POSITIVE):
            witness = Witness(wa, wb, kind)
            break
    return c1, c2, c3, witness


def _poly3_ratio_notes(p: Poly3) -> list[str]:
    tol = _rel_tol(*p.coefficients)
    d1 = p.a2 * p.b1 - p.a1 * p.b2
    d3 = p.a0 * p.b2 - p.a2 * p.b0
    notes = []
    for name, num, den in (("cond1", p.a2 * p.b0 - p.a0 * p.b2, d1),
                           ("cond2", p.a1 * p.b0 - p.a0 * p.b1, -d1),
                           ("cond3", p.a0 * p.b1 - p.a1 * p.b0, d3)):
        notes.append(f"{name}: {_ratio_condition(num, den, tol)[1]}")
    return notes


def _proportional(eq: AbelEquation) -> tuple[float, float] | None:
    """``(a, b) != 0`` with ``a A + b B`` identically zero, if any."""
    t = np.linspace(0.0, 1.0, 257)
    M = np.stack([np.asarray(eq.A(t), dtype=float), np.asarray(eq.B(t), dtype=float)], axis=1)
    _, s, vt = np.linalg.svd(M)
    scale = max(1.0, float(np.abs(M).max()))
    if s[-1] <= 1e-12 * scale * math.sqrt(len(t)):
        a, b = vt[-1]
        return float(a), float(b)
    return None


def corollary_periodic_ends(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float,
                            j: int, k: int) -> CriterionReport:
    """Unique non-zero orbit when ``a1 + a2 = b1 + b2 = 0`` (A and B take
    equal values at both ends of [0, 1])."""
    name = "corollary_periodic_ends"
    tol = _rel_tol(a0, a1, a2, b0, b1, b2)
    if abs(a1 + a2) > math.sqrt(tol) or abs(b1 + b2) > math.sqrt(tol):
        return CriterionReport(name, False, notes=("needs a1 + a2 = 0 and b1 + b2 = 0",))
    if center_test_poly3(a0, a1, a2, b0, b1, b2, j, k):
        return CriterionReport(name, False, notes=("equation has a center at x = 0",))
    p = Poly3(a0, a1, a2, b0, b1, b2, j, k)
    eq = p.equation()
    c1, c2, c3, w = poly3_conditions(a0, a1, a2, b0, b1, b2, j, k)
    notes = _poly3_ratio_notes(p)
    if w is None:
        # every paper witness vanishes identically: A and B are proportional
        w = witness_search_thmA(eq)
        if w is None:
            pr = _proportional(eq)
            if pr is not None:
                notes.append("A and B are proportional; the separable-equation argument "
                             "gives at most one non-zero orbit")
                sc = certify_witness(eq, *pr)
                return CriterionReport(name, True, Witness(pr[0], pr[1], WitnessKind.SEPARABLE),
                                       sc, 1, True, None, tuple(notes),
                                       {"conditions": (c1, c2, c3)})
            return CriterionReport(name, False, notes=tuple(notes + ["no witness found"]),
                                   details={"conditions": (c1, c2, c3)})
    sc = certify_witness(eq, w.a, w.b)
    return CriterionReport(name, True, w, sc, 1, True, _safe_locate(eq, w), tuple(notes),
                           {"conditions": (c1, c2, c3)})


# ---------------------------------------------------------------------------
# generic witness search


def _angle_margins(Av: np.ndarray, Bv: np.ndarray, theta: np.ndarray) -> np.ndarray:
    comb = np.cos(theta)[:, None] * Av[None, :] + np.sin(theta)[:, None] * Bv[None, :]
    return np.maximum(comb.min(axis=1), -comb.max(axis=1))


def _angular_search(eq: AbelEquation, n_angles: int, kind: WitnessKind,
                    A: CoefficientFunction | None = None) -> Witness | None:
    A = eq.A if A is None else A
    t = np.linspace(0.0, 1.0, 1024)
    Av = np.asarray(A(t), dtype=float)
    Bv = np.asarray(eq.B(t), dtype=float)
    theta = np.arange(n_angles) * math.pi / n_angles
    margin = _angle_margins(Av, Bv, theta)
    h = math.pi / n_angles
    order = np.argsort(-margin)[:4]
    target = abel(A, eq.B)
    for i in order:
        th0 = theta[i]
        res = optimize.minimize_scalar(
            lambda th: -float(_angle_margins(Av, Bv, np.array([th]))[0]),
            bounds=(th0 - h, th0 + h), method="bounded", options={"xatol": THETA_TOL})
        for th in (float(res.x), float(th0)):
            a, b = math.cos(th), math.sin(th)
            if _certified(certify_witness(target, a, b)):
                return Witness(a, b, kind)
    return None


def witness_search_thmA(eq: AbelEquation, n_angles: int = N_ANGLES) -> Witness | None:
    """A certified ``(a, b)`` with ``a A + b B`` sign-definite, or ``None``.

    Order: ``A`` alone, ``B`` alone, the closed-form family conditions, then
    an angular scan of ``(cos theta, sin theta)`` with bounded refinement.
    ``None`` only means no witness was found at this resolution.
    """
    if n_angles < 16:
        raise ValueError("n_angles must be at least 16")
    if not eq.C.is_zero:
        raise ValueError("witness search needs C identically zero; see thm51_check")
    if sign_range(eq.A).definite:
        return Witness(1.0, 0.0, WitnessKind.PROP28_A_ONLY)
    if sign_range(eq.B).definite:
        return Witness(0.0, 1.0, WitnessKind.PROP28_B_ONLY)
    trig = trig1_coefficients(eq)
    if trig is not None:
        # the amplitude inequality is exact: no family witness means none at all
        return trig1_conditions(*trig.coefficients)[3]
    poly = poly3_coefficients(eq)
    if poly is not None:
        w = poly3_conditions(*poly.coefficients, poly.j, poly.k)[3]
        if w is not None:
            return w
    return _angular_search(eq, n_angles, WitnessKind.THM_A)


def _safe_locate(eq: AbelEquation, w: Witness) -> Region | None:
    if not eq.C.is_zero or w.a == 0.0 or w.b == 0.0:
        return None
    return locate_orbit(eq, w)


def thm_a_check(eq: AbelEquation, n_angles: int = N_ANGLES) -> CriterionReport:
    """Run the witness search and package the outcome with a location."""
    name = "thm_a"
    w = witness_search_thmA(eq, n_angles)
    notes: list[str] = []
    details: dict = {}
    trig = trig1_coefficients(eq)
    if trig is not None:
        ca, cb, cm, _ = trig1_conditions(*trig.coefficients)
        q = trig1_q_feasible(*trig.coefficients)
        details.update(cond_a=ca, cond_b=cb, cond_mixed=cm, q_feasible=q)
        if q != (ca or cb or cm):
            notes.append("closed-form conditions and direct q feasibility disagree")
        if center_test_trig1(*trig.coefficients):
            notes.append("equation has a center at x = 0")
    poly = poly3_coefficients(eq)
    if poly is not None:
        notes.extend(_poly3_ratio_notes(poly))
        if center_test_poly3(*poly.coefficients, poly.j, poly.k):
            notes.append("equation has a center at x = 0")
    if w is None:
        notes.append("no witness found at this resolution")
        return CriterionReport(name, False, notes=tuple(notes), details=details)
    sc = certify_witness(eq, w.a, w.b)
    return CriterionReport(name, True, w, sc, 1, True, _safe_locate(eq, w), tuple(notes), details)


# ---------------------------------------------------------------------------
# orbit location


def locate_orbit(eq: AbelEquation, w: Witness) -> Region | None:
    """Region that must contain the non-zero orbit, from the signs of
    ``int A``, ``int B`` after normalising ``a/b > 0`` and
    ``(a A + b B)/b >= 0``.

    The normalisation uses ``x -> -x`` (``B -> -B``, ``b -> -b``) and the
    time reflection ``t -> 1 - t`` (``A, B -> -A, -B``), which keeps initial
    conditions of periodic orbits.  Returns ``None`` when ``a`` or ``b`` is
    zero.
    """
    if not eq.C.is_zero:
        raise ValueError("orbit location needs C identically zero")
    a, b = w.a, w.b
    if a == 0.0 or b == 0.0:
        return None
    sc = certify_witness(eq, a, b)
    if not sc.definite:
        raise ValueError("witness is not sign-definite")
    comb_sign = 1.0 if sc.sign is Sign.NON_NEGATIVE else -1.0
    ia, ib = eq.A.integrate(), eq.B.integrate()
    flip_x = a / b < 0
    if flip_x:
        ib, b = -ib, -b
    h_sign = comb_sign / math.copysign(1.0, b)
    flip_t = h_sign < 0
    if flip_t:
        ia, ib = -ia, -ib
    r = a / b
    tol_a = ZERO_TOL * eq.A.scale
    tol_b = ZERO_TOL * eq.B.scale
    if ia < -tol_a:
        lo, hi, case, sure = r, math.inf, "i", False
    elif ia > tol_a and ib > tol_b:
        lo, hi, case, sure = -math.inf, 0.0, "ii", False
    elif ia > tol_a and ib < -tol_b:
        lo, hi, case, sure = 0.0, r, "iii", True
    else:
        lo, hi, case, sure = 0.0, 0.0, "none", False
    if flip_x and case != "none":
        lo, hi = -hi, -lo
    return Region(lo, hi, case, sure, flip_x, flip_t)


# ---------------------------------------------------------------------------
# linear term with zero mean


def _exp_primitive(C: CoefficientFunction, t: np.ndarray) -> np.ndarray:
    return np.exp(np.asarray(C.antiderivative(t), dtype=float))


def thm51_transform(eq: AbelEquation, nodes: int = THM51_NODES) -> AbelEquation:
    """Remove the linear term by ``y = x exp(-int_0^t C)``.

    The result is ``y' = A e^{2G} y**3 + B e^{G} y**2`` with ``G = int_0^t C``,
    tabulated on ``nodes`` points.  When ``int_0^1 C = 0`` it has the same
    periodic initial conditions and multipliers as ``eq``.
    """
    if eq.C.is_zero:
        return eq
    t = np.linspace(0.0, 1.0, nodes)
    e = _exp_primitive(eq.C, t)
    return abel(Sampled(t, np.asarray(eq.A(t)) * e * e), Sampled(t, np.asarray(eq.B(t)) * e))


def thm51_check(eq: AbelEquation, witness_hint: tuple[float, float] | None = None,
                n_angles: int = N_ANGLES) -> CriterionReport:
    """Uniqueness with a zero-mean linear term: look for ``(a, b)`` making
    ``a A exp(int_0^t C) + b B`` sign-definite."""
    name = "thm51"
    ic = eq.C.integrate()
    if abs(ic) > MEAN_TOL:
        return CriterionReport(name, False, notes=(
            f"int C = {ic:.6g} is not zero; use thm52_check",), details={"int_C": ic})
    if eq.C.is_zero:
        rep = thm_a_check(eq, n_angles)
        w = rep.witness
        if w is None:
            return CriterionReport(name, False, notes=rep.notes, details={"int_C": ic})
        return CriterionReport(name, True, Witness(w.a, w.b, WitnessKind.THM51), rep.sign_evidence,
                               1, True, rep.location, rep.notes + ("C = 0: same as thm_a",),
                               {"int_C": ic, "source_kind": w.kind.value})
    t = np.linspace(0.0, 1.0, THM51_NODES)
    A_tilde = Sampled(t, np.asarray(eq.A(t)) * _exp_primitive(eq.C, t))
    reduced = abel(A_tilde, eq.B)
    w = None
    if witness_hint is not None:
        a, b = witness_hint
        if _certified(certify_witness(reduced, a, b)):
            w = Witness(a, b, WitnessKind.THM51)
    if w is None:
        for a, b in ((1.0, 0.0), (0.0, 1.0)):
            if _certified(certify_witness(reduced, a, b)):
                w = Witness(a, b, WitnessKind.THM51)
                break
    if w is None:
        w = _angular_search(reduced, n_angles, WitnessKind.THM51)
    if w is None:
        return CriterionReport(name, False, notes=("no witness found at this resolution",),
                               details={"int_C": ic})
    sc = certify_witness(reduced, w.a, w.b)
    return CriterionReport(name, True, w, sc, 1, True, None, (), {"int_C": ic})


# ---------------------------------------------------------------------------
# three constants


def thm52_expression(eq: AbelEquation, a: float, b: float, c: float, t):
    """``(b C - c A)**2 + (a A + b B)(c B + a C)``."""
    t = np.asarray(t, dtype=float)
    A, B, C = (np.asarray(f(t), dtype=float) for f in (eq.A, eq.B, eq.C))
    out = (b * C - c * A) ** 2 + (a * A + b * B) * (c * B + a * C)
    return out if out.ndim else float(out)


def thm52_check(eq: AbelEquation, a: float, b: float, c: float) -> CriterionReport:
    """At most four non-zero orbits when ``a A + b B`` is sign-definite and
    the quadratic expression is strictly negative on [0, 1]."""
    name = "thm52"
    w = Witness(a, b, WitnessKind.THM52, c)
    sc = certify_witness(eq, a, b)
    t = np.linspace(0.0, 1.0, THM52_GRID)
    v = thm52_expression(eq, a, b, c, t)
    i = int(np.argmax(v))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, len(t) - 1)]
    res = optimize.minimize_scalar(lambda s: -thm52_expression(eq, a, b, c, s),
                                   bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    t_max, v_max = (float(res.x), -float(res.fun)) if -res.fun > v[i] else (float(t[i]), float(v[i]))
    scale = max(1.0, abs(a) + abs(b) + abs(c)) ** 2 * max(eq.A.scale, eq.B.scale, eq.C.scale) ** 2
    second = v_max <= -THM52_MARGIN * scale
    notes = []
    details = {"max_expression": v_max, "argmax_t": t_max, "first_condition": sc.definite,
               "second_condition": second}
    if eq.C.is_zero and c == 0.0:
        notes.append("C = 0 and c = 0 make the expression vanish; use thm_a_check")
    if not sc.definite:
        notes.append("a A + b B is not sign-definite")
    if not second:
        notes.append(f"expression reaches {v_max:.6g} at t = {t_max:.6g}; must stay negative")
    applies = sc.definite and second
    if applies:
        notes.append("the sign set of M_w is only certified on a grid; flow-invariance of its "
                     "zero set is not checked")
    return CriterionReport(name, applies, w if applies else None, sc, 4 if applies else None,
                           False, None, tuple(notes), details)
