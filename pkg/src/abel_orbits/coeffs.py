"""Coefficient functions A(t), B(t), C(t) on the unit interval.

Three representations are supported:

* :class:`TrigPoly`   -- ``c0 + sum_n (cos_n cos(2 pi n t) + sin_n sin(2 pi n t))``
* :class:`MonomialPoly` -- ``sum_i coef_i t**exp_i``
* :class:`Sampled`    -- cubic-spline interpolant of tabulated values

All of them are immutable.  Trig and monomial functions integrate in closed
form; the sign of a degree-one trigonometric polynomial and of a monomial
polynomial is decided exactly rather than by sampling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

TWO_PI = 2.0 * math.pi

#: relative tolerance used to decide that a function vanishes identically
ZERO_TOL = 1e-12

#: node count used when a non-sampled function is promoted to :class:`Sampled`
PROMOTION_NODES = 1025


class DomainError(ValueError):
    """Raised when a coefficient function is evaluated outside [0, 1]."""


def _check_domain(t) -> None:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise DomainError(f"t must lie in [0, 1], got {t!r}")


class CoefficientFunction:
    """Base class of the coefficient representations.

    Subclasses implement ``__call__`` (unchecked, vectorised evaluation),
    ``antiderivative`` (``int_0^t f``), ``derivative`` and ``scale``.
    """

    def __call__(self, t):
        raise NotImplementedError

    def antiderivative(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    @property
    def scale(self) -> float:
        """Magnitude used for relative zero tests: ``max(1, sum |coef|)``."""
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        """True when every stored coefficient is exactly zero."""
        raise NotImplementedError

    def eval(self, t):
        """Evaluate with a domain check on ``t``."""
        _check_domain(t)
        return self(t)

    def integrate(self, t0: float = 0.0, t1: float = 1.0) -> float:
        _check_domain([t0, t1])
        return float(self.antiderivative(t1) - self.antiderivative(t0))

    @property
    def bounds(self) -> tuple[float, float]:
        """Upper bounds on ``sup |f|`` and ``sup |f'|`` over [0, 1]."""
        raise NotImplementedError

    def sampled(self, n: int = PROMOTION_NODES) -> "Sampled":
        t = np.linspace(0.0, 1.0, n)
        return Sampled(t, self(t))


@dataclass(frozen=True)
class TrigPoly(CoefficientFunction):
    """1-periodic trigonometric polynomial with argument ``2 pi n t``."""

    c0: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = tuple(float(v) for v in self.cos_coeffs)
        s = tuple(float(v) for v in self.sin_coeffs)
        n = max(len(c), len(s))
        c += (0.0,) * (n - len(c))
        s += (0.0,) * (n - len(s))
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "cos_coeffs", c)
        object.__setattr__(self, "sin_coeffs", s)

    @property
    def degree(self) -> int:
        d = 0
        for n, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            if c != 0.0 or s != 0.0:
                d = n
        return d

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.c0) + sum(map(abs, self.cos_coeffs)) + sum(map(abs, self.sin_coeffs)))

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0.0 and not any(self.cos_coeffs) and not any(self.sin_coeffs)

    @property
    def bounds(self) -> tuple[float, float]:
        amp = np.hypot(self.cos_coeffs, self.sin_coeffs)
        w = TWO_PI * np.arange(1, len(amp) + 1)
        return abs(self.c0) + float(amp.sum()), float((w * amp).sum())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.c0)
        for n, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            if c == 0.0 and s == 0.0:
                continue
            arg = TWO_PI * n * t
            if c != 0.0:
                out += c * np.cos(arg)
            if s != 0.0:
                out += s * np.sin(arg)
        return out if out.ndim else float(out)

    def antiderivative(self, t):
        t = np.asarray(t, dtype=float)
        out = self.c0 * t
        for n, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = TWO_PI * n
            out = out + c * np.sin(w * t) / w + s * (1.0 - np.cos(w * t)) / w
        return out if np.ndim(out) else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for n, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = TWO_PI * n
            out = out - c * w * np.sin(w * t) + s * w * np.cos(w * t)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class MonomialPoly(CoefficientFunction):
    """Sum of monomials ``coef * t**exp`` with strictly increasing exponents."""

    terms: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        terms = []
        for exp, coef in self.terms:
            if int(exp) != exp or exp < 0:
                raise ValueError(f"exponents must be non-negative integers, got {exp!r}")
            terms.append((int(exp), float(coef)))
        exps = [e for e, _ in terms]
        if len(set(exps)) != len(exps):
            raise ValueError(f"duplicate exponents in {exps}")
        terms.sort()
        object.__setattr__(self, "terms", tuple(terms))
        # Horner coefficients, highest power first
        object.__setattr__(self, "_horner", tuple(self.dense()[::-1]) if terms else (0.0,))

    @classmethod
    def family(cls, c0: float, c1: float, c2: float, j: int, k: int) -> "MonomialPoly":
        """The three-monomial shape ``c0 + c1 t**j + c2 t**k``."""
        if not 0 < j < k:
            raise ValueError(f"need 0 < j < k, got j={j}, k={k}")
        return cls(((0, c0), (j, c1), (k, c2)))

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.terms)

    def coefficient(self, exp: int) -> float:
        for e, c in self.terms:
            if e == exp:
                return c
        return 0.0

    @property
    def scale(self) -> float:
        return max(1.0, sum(abs(c) for _, c in self.terms))

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for _, c in self.terms)

    @property
    def bounds(self) -> tuple[float, float]:
        return (sum(abs(c) for _, c in self.terms),
                sum(e * abs(c) for e, c in self.terms))

    def dense(self) -> np.ndarray:
        """Ascending dense coefficient vector."""
        if not self.terms:
            return np.zeros(1)
        out = np.zeros(self.terms[-1][0] + 1)
        for e, c in self.terms:
            out[e] = c
        return out

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lead, *rest = self._horner
        out = np.full_like(t, lead)
        for c in rest:
            out = out * t + c
        return out if out.ndim else float(out)

    def antiderivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for e, c in self.terms:
            out = out + c * t ** (e + 1) / (e + 1)
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for e, c in self.terms:
            if e > 0:
                out = out + c * e * t ** (e - 1)
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class Sampled(CoefficientFunction):
    """Cubic-spline interpolant through ``(t_i, v_i)`` covering [0, 1]."""

    t: np.ndarray
    values: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("t and values must be 1-d arrays of equal length")
        if len(t) < 8:
            raise ValueError(f"sampled coefficient needs at least 8 nodes, got {len(t)}")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise ValueError("samples must span [0, 1]")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        t[0], t[-1] = 0.0, 1.0
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_spline", CubicSpline(t, v))

    @classmethod
    def from_function(cls, fn: Callable, n: int = PROMOTION_NODES) -> "Sampled":
        t = np.linspace(0.0, 1.0, n)
        return cls(t, np.asarray(fn(t), dtype=float))

    def __eq__(self, other):
        if not isinstance(other, Sampled):
            return NotImplemented
        return np.array_equal(self.t, other.t) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.t.tobytes(), self.values.tobytes()))

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.values))))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    @property
    def bounds(self) -> tuple[float, float]:
        # per-piece bound on the cubic and its derivative
        c = np.abs(self._spline.c)
        h = np.diff(self.t)
        sup = c[0] * h**3 + c[1] * h**2 + c[2] * h + c[3]
        dsup = 3 * c[0] * h**2 + 2 * c[1] * h + c[2]
        return float(sup.max()), float(dsup.max())

    def __call__(self, t):
        out = self._spline(t)
        return out if np.ndim(out) else float(out)

    def antiderivative(self, t):
        out = self._spline.antiderivative()(t)
        return out if np.ndim(out) else float(out)

    def derivative(self, t):
        out = self._spline(t, 1)
        return out if np.ndim(out) else float(out)


ZERO = TrigPoly()


def constant(value: float) -> TrigPoly:
    return TrigPoly(value)


def evaluate(f: CoefficientFunction, t):
    """Evaluate ``f`` at ``t`` in [0, 1]; raises :class:`DomainError` outside."""
    return f.eval(t)


def integrate_exact(f: CoefficientFunction, t0: float = 0.0, t1: float = 1.0) -> float:
    """Definite integral of ``f`` over ``[t0, t1]``.

    Closed form for trig and monomial functions; exact integral of the
    interpolating spline for sampled ones.
    """
    return f.integrate(t0, t1)


def linear_combination(a: float, f: CoefficientFunction, b: float, g: CoefficientFunction) -> CoefficientFunction:
    """Return ``a*f + b*g``, exact when both share a closed-form variant."""
    a, b = float(a), float(b)
    if isinstance(f, TrigPoly) and isinstance(g, TrigPoly):
        n = max(len(f.cos_coeffs), len(g.cos_coeffs))
        fc = np.zeros(n); fc[: len(f.cos_coeffs)] = f.cos_coeffs
        gc = np.zeros(n); gc[: len(g.cos_coeffs)] = g.cos_coeffs
        fs = np.zeros(n); fs[: len(f.sin_coeffs)] = f.sin_coeffs
        gs = np.zeros(n); gs[: len(g.sin_coeffs)] = g.sin_coeffs
        return TrigPoly(a * f.c0 + b * g.c0, tuple(a * fc + b * gc), tuple(a * fs + b * gs))
    if isinstance(f, MonomialPoly) and isinstance(g, MonomialPoly):
        exps = sorted(set(f.exponents) | set(g.exponents))
        return MonomialPoly(tuple((e, a * f.coefficient(e) + b * g.coefficient(e)) for e in exps))
    # mixed variants: merge on a common grid
    if isinstance(f, Sampled) and isinstance(g, Sampled) and np.array_equal(f.t, g.t):
        t = f.t
    else:
        n = max([PROMOTION_NODES] + [len(h.t) for h in (f, g) if isinstance(h, Sampled)])
        t = np.linspace(0.0, 1.0, n)
    return Sampled(t, a * np.asarray(f(t)) + b * np.asarray(g(t)))


# ---------------------------------------------------------------------------
# sign analysis


class Sign(enum.Enum):
    IDENTICALLY_ZERO = "identically_zero"
    NON_NEGATIVE = "non_negative"
    NON_POSITIVE = "non_positive"
    CHANGES_SIGN = "changes_sign"


@dataclass(frozen=True)
class SignClass:
    """Sign verdict of a function on [0, 1] together with its evidence.

    ``minimum``/``maximum`` are the extreme values found and the points in
    ``evidence`` attain them (plus any located sign crossings).  ``method``
    is ``"exact"`` for the closed-form certificates and ``"grid-certified"`` for the
    sampled-and-refined path.
    """

    sign: Sign
    minimum: float
    maximum: float
    evidence: tuple[tuple[float, float], ...]
    method: str
    scale: float = 1.0

    @property
    def definite(self) -> bool:
        return self.sign in (Sign.NON_NEGATIVE, Sign.NON_POSITIVE)

    @property
    def margin(self) -> float:
        """Signed distance from changing sign, relative to ``scale``.

        Non-negative iff the function keeps one sign (up to round-off).
        """
        return max(self.minimum, -self.maximum) / self.scale


def _classify(fmin: float, fmax: float, scale: float, tol: float) -> Sign:
    thr = tol * scale
    if max(abs(fmin), abs(fmax)) <= thr:
        return Sign.IDENTICALLY_ZERO
    if fmin >= -thr:
        return Sign.NON_NEGATIVE
    if fmax <= thr:
        return Sign.NON_POSITIVE
    return Sign.CHANGES_SIGN


def _trig1_extrema(f: TrigPoly):
    c1 = f.cos_coeffs[0] if f.cos_coeffs else 0.0
    s1 = f.sin_coeffs[0] if f.sin_coeffs else 0.0
    amp = math.hypot(c1, s1)
    t_max = (math.atan2(s1, c1) / TWO_PI) % 1.0
    t_min = (t_max + 0.5) % 1.0
    return (t_min, f.c0 - amp), (t_max, f.c0 + amp)


def _monomial_candidates(f: MonomialPoly) -> np.ndarray:
    """Endpoints plus every real critical point of ``f`` inside (0, 1)."""
    cand = [0.0, 1.0]
    nonzero = [(e, c) for e, c in f.terms if c != 0.0 and e > 0]
    if len(nonzero) == 2:
        # c1 t^p + c2 t^q (+ const): critical point from t^(q-p) = -c1 p / (c2 q)
        (p, c1), (q, c2) = nonzero
        r = -c1 * p / (c2 * q)
        if r > 0:
            tc = r ** (1.0 / (q - p))
            if 0.0 < tc < 1.0:
                cand.append(tc)
    elif len(nonzero) > 2:
        deriv = np.polynomial.polynomial.polyder(f.dense())
        # leading terms negligible on [0, 1] would blow up the companion matrix
        deriv = np.polynomial.polynomial.polytrim(deriv, 1e-14 * np.max(np.abs(deriv)))
        roots = np.polynomial.polynomial.polyroots(deriv) if np.any(deriv) else []
        for r in roots:
            if abs(r.imag) < 1e-7 and 0.0 < r.real < 1.0:
                cand.append(float(r.real))
        # cheap backstop against ill-conditioned companion roots
        cand.extend(np.linspace(0.0, 1.0, 257)[1:-1])
    return np.array(cand)


def _grid_extrema(f: CoefficientFunction, grid_size: int):
    t = np.linspace(0.0, 1.0, grid_size)
    v = np.asarray(f(t), dtype=float)
    pts_min = [(float(t[i]), float(v[i])) for i in _local_extrema(v, np.less_equal)]
    pts_max = [(float(t[i]), float(v[i])) for i in _local_extrema(v, np.greater_equal)]
    h = t[1] - t[0]

    def refine(ti, sgn):
        lo, hi = max(0.0, ti - h), min(1.0, ti + h)
        res = optimize.minimize_scalar(lambda s: sgn * float(f(s)), bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-12})
        return float(res.x), float(f(res.x))

    # refine only the most extreme few candidates
    pts_min = sorted(pts_min, key=lambda p: p[1])[:8]
    pts_max = sorted(pts_max, key=lambda p: -p[1])[:8]
    lo = min([refine(ti, 1.0) for ti, _ in pts_min] + pts_min, key=lambda p: p[1])
    hi = max([refine(ti, -1.0) for ti, _ in pts_max] + pts_max, key=lambda p: p[1])
    crossings = []
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    for i in idx[:4]:
        tc = optimize.brentq(lambda s: float(f(s)), t[i], t[i + 1], xtol=1e-14)
        crossings.append((float(tc), 0.0))
    return lo, hi, crossings


def _local_extrema(v: np.ndarray, cmp) -> list[int]:
    n = len(v)
    idx = [i for i in range(n)
           if (i == 0 or cmp(v[i], v[i - 1])) and (i == n - 1 or cmp(v[i], v[i + 1]))]
    return idx


def sign_range(f: CoefficientFunction, grid_size: int = 1024, tol: float = ZERO_TOL) -> SignClass:
    """Decide whether ``f`` vanishes, keeps a sign, or changes sign on [0, 1].

    Degree-one trigonometric polynomials use the amplitude bound
    ``c0 -/+ sqrt(c1**2 + s1**2)`` and monomial polynomials use their
    critical points, so both verdicts are exact.  Anything else is sampled on
    ``grid_size`` nodes and the extreme samples are refined by bounded
    minimisation.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    scale = f.scale
    crossings: list[tuple[float, float]] = []
    if isinstance(f, TrigPoly) and f.degree <= 1:
        lo, hi = _trig1_extrema(f)
        method = "exact"
    elif isinstance(f, MonomialPoly):
        cand = _monomial_candidates(f)
        vals = np.asarray(f(cand), dtype=float)
        lo = (float(cand[np.argmin(vals)]), float(vals.min()))
        hi = (float(cand[np.argmax(vals)]), float(vals.max()))
        method = "exact"
    else:
        lo, hi, crossings = _grid_extrema(f, grid_size)
        method = "grid-certified"
    sign = _classify(lo[1], hi[1], scale, tol)
    evidence = (lo, hi) + tuple(crossings)
    return SignClass(sign, lo[1], hi[1], evidence, method, scale)


# ---------------------------------------------------------------------------
# the equation


@dataclass(frozen=True)
class AbelEquation:
    """``dx/dt = A(t) x**3 + B(t) x**2 + C(t) x`` on the strip [0, 1] x R."""

    A: CoefficientFunction
    B: CoefficientFunction
    C: CoefficientFunction = ZERO

    def h(self, t, x):
        """Right-hand side (unchecked, broadcasting)."""
        x2 = x * x
        out = self.A(t) * x2 * x + self.B(t) * x2
        if not self.C.is_zero:
            out = out + self.C(t) * x
        return out

    def h_x(self, t, x):
        """Partial derivative of the right-hand side in ``x``."""
        out = 3.0 * self.A(t) * x * x + 2.0 * self.B(t) * x
        if not self.C.is_zero:
            out = out + self.C(t)
        return out

    def h_and_h_x(self, t, x):
        a, b = self.A(t), self.B(t)
        x2 = x * x
        h = a * x2 * x + b * x2
        hx = 3.0 * a * x2 + 2.0 * b * x
        if not self.C.is_zero:
            c = self.C(t)
            h = h + c * x
            hx = hx + c
        return h, hx

    @property
    def has_linear_term(self) -> bool:
        return not self.C.is_zero


def abel(A, B, C=ZERO) -> AbelEquation:
    """Build an equation, accepting plain numbers for constant coefficients."""
    def coerce(f):
        return TrigPoly(f) if isinstance(f, (int, float)) else f
    return AbelEquation(coerce(A), coerce(B), coerce(C))


def trig1(c0: float, c1: float = 0.0, s1: float = 0.0) -> TrigPoly:
    """Degree-one trig polynomial ``c0 + c1 cos(2 pi t) + s1 sin(2 pi t)``."""
    return TrigPoly(c0, (c1,), (s1,))
