"""Lyapunov constants of the zero solution and the two-orbit designers.

For ``x' = A(t) x**3 + B(t) x**2`` the displacement near the origin expands
as ``Pi(x) - x = V2 x**2 + (V3 + V2**2) x**3 + (V4 + 2 V2 V3 + V2**3) x**4 + ...``
with

* ``V2 = int_0^1 B``,
* ``V3 = int_0^1 A``,
* ``V4 = int_0^1 A(t) int_0^t B(s) ds dt``.

Closed forms are used for degree-one trigonometric and monomial
coefficients; anything else goes through an augmented ODE quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .coeffs import ZERO_TOL, AbelEquation, MonomialPoly, TrigPoly, abel

__all__ = [
    "Method",
    "CenterVerdict",
    "LyapunovConstants",
    "UnsupportedFamilyError",
    "PreconditionError",
    "Trig1",
    "Poly3",
    "trig1_coefficients",
    "poly3_coefficients",
    "lyapunov_constants",
    "v4_quadrature",
    "v4_trig1",
    "v4_poly3",
    "v4_monomial",
    "center_test_trig1",
    "center_test_poly3",
    "design_two_orbit_trig",
    "design_two_orbit_poly",
    "poly3_v4_factor",
]

QUAD_TOL = 1e-13


class Method(enum.Enum):
    CLOSED_FORM_TRIG1 = "closed_form_trig1"
    CLOSED_FORM_POLY3 = "closed_form_poly3"
    QUADRATURE = "quadrature"


class CenterVerdict(enum.Enum):
    CENTER = "center"
    NOT_CENTER = "not_center"
    UNDECIDABLE = "undecidable"


class UnsupportedFamilyError(ValueError):
    """The equation has a linear term; the constants assume ``C = 0``."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Trig1:
    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    @property
    def coefficients(self) -> tuple[float, ...]:
        return (self.a0, self.a1, self.a2, self.b0, self.b1, self.b2)

    @property
    def cross(self) -> float:
        """``a2*b1 - a1*b2``."""
        return self.a2 * self.b1 - self.a1 * self.b2

    def equation(self) -> AbelEquation:
        return abel(TrigPoly(self.a0, (self.a1,), (self.a2,)),
                    TrigPoly(self.b0, (self.b1,), (self.b2,)))


@dataclass(frozen=True)
class Poly3:
    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float
    j: int
    k: int

    def __post_init__(self):
        if not 0 < self.j < self.k:
            raise PreconditionError(f"need 0 < j < k, got j={self.j}, k={self.k}")

    @property
    def coefficients(self) -> tuple[float, ...]:
        return (self.a0, self.a1, self.a2, self.b0, self.b1, self.b2)

    @property
    def cross(self) -> float:
        return self.a2 * self.b1 - self.a1 * self.b2

    @property
    def mean_a(self) -> float:
        return self.a0 + self.a1 / (self.j + 1) + self.a2 / (self.k + 1)

    @property
    def mean_b(self) -> float:
        return self.b0 + self.b1 / (self.j + 1) + self.b2 / (self.k + 1)

    def equation(self) -> AbelEquation:
        return abel(MonomialPoly.family(self.a0, self.a1, self.a2, self.j, self.k),
                    MonomialPoly.family(self.b0, self.b1, self.b2, self.j, self.k))


@dataclass(frozen=True)
class LyapunovConstants:
    """``V2, V3, V4`` of the zero solution with how they were obtained.

    ``v3`` carries meaning only when ``v2`` vanishes and ``v4`` only when
    both do; all three are reported regardless.
    """

    v2: float
    v3: float
    v4: float
    method: Method
    center_verdict: CenterVerdict
    tolerance: float = 0.0

    def first_nonzero(self) -> int | None:
        """Index (2, 3 or 4) of the first constant above tolerance."""
        for idx, v in ((2, self.v2), (3, self.v3), (4, self.v4)):
            if abs(v) > self.tolerance:
                return idx
        return None


def trig1_coefficients(eq: AbelEquation) -> Trig1 | None:
    """Return the degree-one trigonometric coefficients, if ``eq`` has that shape."""
    if not eq.C.is_zero:
        return None
    if not (isinstance(eq.A, TrigPoly) and isinstance(eq.B, TrigPoly)):
        return None
    if eq.A.degree > 1 or eq.B.degree > 1:
        return None

    def parts(f: TrigPoly):
        c = f.cos_coeffs[0] if f.cos_coeffs else 0.0
        s = f.sin_coeffs[0] if f.sin_coeffs else 0.0
        return f.c0, c, s

    return Trig1(*parts(eq.A), *parts(eq.B))


def poly3_coefficients(eq: AbelEquation) -> Poly3 | None:
    """Return ``(a0..a2, b0..b2, j, k)`` when A and B are monomial sums on
    exponents ``{0, j, k}``.  Missing exponents are filled in with zeros."""
    if not eq.C.is_zero:
        return None
    A, B = eq.A, eq.B
    # a zero trig coefficient is the zero polynomial
    if isinstance(A, TrigPoly) and A.is_zero:
        A = MonomialPoly()
    if isinstance(B, TrigPoly) and B.is_zero:
        B = MonomialPoly()
    if not (isinstance(A, MonomialPoly) and isinstance(B, MonomialPoly)):
        return None
    exps = sorted({e for e in A.exponents + B.exponents
                   if e != 0 and (A.coefficient(e) != 0.0 or B.coefficient(e) != 0.0)})
    if len(exps) > 2:
        return None
    if len(exps) == 0:
        j, k = 1, 2
    elif len(exps) == 1:
        j, k = exps[0], exps[0] + 1
    else:
        j, k = exps
    return Poly3(A.coefficient(0), A.coefficient(j), A.coefficient(k),
                 B.coefficient(0), B.coefficient(j), B.coefficient(k), j, k)


def v4_trig1(p: Trig1) -> float:
    """``int A int B`` for degree-one trigonometric A and B (any a0, b0)."""
    return (p.a0 * p.b0 / 2 + (p.a0 * p.b2 - p.a2 * p.b0) / (2 * math.pi)
            + p.cross / (4 * math.pi))


def v4_monomial(A: MonomialPoly, B: MonomialPoly) -> float:
    """``sum_{p,q} a_p b_q / ((q + 1) (p + q + 2))``."""
    return sum(a * b / ((q + 1) * (p + q + 2)) for p, a in A.terms for q, b in B.terms)


def poly3_v4_factor(j: int, k: int) -> float:
    """``V4 / (a2 b1 - a1 b2)`` on the family where ``V2 = V3 = 0``."""
    return j * k * (k - j) / (2 * (1 + j) * (2 + j) * (1 + k) * (2 + k) * (2 + j + k))


def v4_poly3(p: Poly3) -> float:
    """Closed form valid when ``V2 = V3 = 0``: a multiple of ``a2 b1 - a1 b2``."""
    return poly3_v4_factor(p.j, p.k) * p.cross


def v4_quadrature(eq: AbelEquation, tol: float = QUAD_TOL) -> tuple[float, float, float]:
    """``(V2, V3, V4)`` from the ODE ``S' = B, U' = A, W' = A S`` on [0, 1].

    Integrated with scipy's DOP853: the system is smooth and non-stiff, and
    an eighth-order method needs far fewer steps at this tolerance.
    """

    def rhs(t, y):
        a = eq.A(t)
        return [eq.B(t), a, a * y[0]]

    sol = integrate.solve_ivp(rhs, (0.0, 1.0), [0.0, 0.0, 0.0], method="DOP853",
                              rtol=tol, atol=tol)
    if not sol.success:
        raise RuntimeError(f"V4 quadrature failed: {sol.message}")
    s, u, w = sol.y[:, -1]
    return float(s), float(u), float(w)


def _tol_linear(*coefs: float) -> float:
    return ZERO_TOL * max(1.0, sum(abs(c) for c in coefs))


def _tol_cross(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    return ZERO_TOL * max(1.0, sum(map(abs, a))) * max(1.0, sum(map(abs, b)))


def center_test_trig1(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float) -> bool:
    """Center iff ``a0 = b0 = a2 b1 - a1 b2 = 0`` (relative tolerance 1e-12)."""
    tol_a = _tol_linear(a0, a1, a2)
    tol_b = _tol_linear(b0, b1, b2)
    cross = a2 * b1 - a1 * b2
    return bool(abs(a0) <= tol_a and abs(b0) <= tol_b
                and abs(cross) <= _tol_cross((a0, a1, a2), (b0, b1, b2)))


def center_test_poly3(a0: float, a1: float, a2: float, b0: float, b1: float, b2: float,
                      j: int, k: int) -> bool:
    """Center iff both means and ``a2 b1 - a1 b2`` vanish."""
    p = Poly3(a0, a1, a2, b0, b1, b2, j, k)
    return bool(abs(p.mean_a) <= _tol_linear(a0, a1, a2)
                and abs(p.mean_b) <= _tol_linear(b0, b1, b2)
                and abs(p.cross) <= _tol_cross((a0, a1, a2), (b0, b1, b2)))


def lyapunov_constants(eq: AbelEquation) -> LyapunovConstants:
    """Compute ``V2, V3, V4`` and the center verdict for ``eq`` (``C = 0``).

    Raises
    ------
    UnsupportedFamilyError
        If ``eq.C`` is not identically zero.
    """
    if not eq.C.is_zero:
        raise UnsupportedFamilyError("Lyapunov constants need C identically zero")
    tol = ZERO_TOL * eq.A.scale * eq.B.scale
    trig = trig1_coefficients(eq)
    if trig is not None:
        verdict = CenterVerdict.CENTER if center_test_trig1(*trig.coefficients) else CenterVerdict.NOT_CENTER
        return LyapunovConstants(trig.b0, trig.a0, v4_trig1(trig), Method.CLOSED_FORM_TRIG1,
                                 verdict, tol)
    poly = poly3_coefficients(eq)
    if poly is not None:
        A = MonomialPoly.family(poly.a0, poly.a1, poly.a2, poly.j, poly.k)
        B = MonomialPoly.family(poly.b0, poly.b1, poly.b2, poly.j, poly.k)
        verdict = CenterVerdict.CENTER if center_test_poly3(*poly.coefficients, poly.j, poly.k) \
            else CenterVerdict.NOT_CENTER
        return LyapunovConstants(poly.mean_b, poly.mean_a, v4_monomial(A, B),
                                 Method.CLOSED_FORM_POLY3, verdict, tol)
    v2, v3, v4 = v4_quadrature(eq)
    tol = max(tol, 10 * QUAD_TOL * eq.A.scale * eq.B.scale)
    vanish = max(abs(v2), abs(v3), abs(v4)) <= tol
    verdict = CenterVerdict.UNDECIDABLE if vanish else CenterVerdict.NOT_CENTER
    return LyapunovConstants(v2, v3, v4, Method.QUADRATURE, verdict, tol)


def _check_hierarchy(v4: float, mu: float, lam: float) -> None:
    if mu == 0.0 and lam == 0.0:
        if v4 < 0:
            raise PreconditionError(f"v4 target must be non-negative, got {v4}")
        return
    if not v4 > 0:
        raise PreconditionError(f"v4 target must be positive, got {v4}")
    if not (0 < lam <= mu / 100):
        raise PreconditionError(f"need 0 < lambda <= mu/100, got mu={mu}, lambda={lam}")
    if not mu <= v4 / 100:
        raise PreconditionError(f"need mu <= v4/100, got mu={mu}, v4={v4}")


def design_two_orbit_trig(v4_target: float, mu: float, lam: float) -> AbelEquation:
    """Degree-one trigonometric equation with ``V2 = lam``, ``V3 = -mu`` and
    ``a2 b1 - a1 b2 = 4 pi v4_target``.

    The gauge is ``a1 = b2 = 0``, ``b1 = 1``.  Requires
    ``0 < lam <= mu/100`` and ``mu <= v4_target/100`` unless ``mu = lam = 0``.
    """
    _check_hierarchy(v4_target, mu, lam)
    return Trig1(-mu, 0.0, 4 * math.pi * v4_target, lam, 1.0, 0.0).equation()


def design_two_orbit_poly(j: int, k: int, v4_scale: float, mu: float, lam: float) -> AbelEquation:
    """Three-monomial equation with ``V2 = lam``, ``V3 = -mu`` and, on the
    unperturbed family, ``V4 = v4_scale``.

    The gauge is ``a1 = b2 = 0``, ``b1 = 1``, so ``a2 = a2 b1 - a1 b2``.
    """
    if not (int(j) == j and int(k) == k and 0 < j < k):
        raise PreconditionError(f"need integers 0 < j < k, got j={j}, k={k}")
    j, k = int(j), int(k)
    _check_hierarchy(v4_scale, mu, lam)
    a1, b1, b2 = 0.0, 1.0, 0.0
    a2 = v4_scale / poly3_v4_factor(j, k)
    den = (j + 1) * (k + 1)
    a0 = -((k + 1) * a1 + (j + 1) * a2) / den - mu
    b0 = -((k + 1) * b1 + (j + 1) * b2) / den + lam
    return Poly3(a0, a1, a2, b0, b1, b2, j, k).equation()
