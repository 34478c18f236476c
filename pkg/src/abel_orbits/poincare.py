"""Poincare map from ``t = 0`` to ``t = 1``, periodic-orbit scans and the
weighted divergence identity."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import simpson

from .coeffs import AbelEquation, CoefficientFunction
from .integrate import (
    COMPLETED,
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    FAILED,
    Completed,
    Escaped,
    Trajectory,
    integrate_batch,
    poincare_batch,
    solve_ivp,
    solve_with_variation_batch,
)
from . import lyapunov

__all__ = [
    "TAU_HYP",
    "ORBIT_SAMPLES",
    "Stability",
    "OrbitRecord",
    "ScanConfig",
    "ScanResult",
    "TimeOnly",
    "SeparablePower",
    "WeightFunction",
    "InvalidWeightError",
    "CenterBand",
    "SemiStable",
    "OrdinaryMultiplicity",
    "poincare_map",
    "scan_periodic_orbits",
    "find_periodic_orbits",
    "multiplier_by_formula",
    "multiplier_by_finite_difference",
    "weighted_divergence_integrand",
    "weighted_divergence_check",
    "classify_zero",
    "hyperbolicity",
]

TAU_HYP = 1e-6
ORBIT_SAMPLES = 1001
CENTER_RUN = 64
CENTER_FACTOR = 10.0


class Stability(enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NON_HYPERBOLIC = "non_hyperbolic"
    ZERO_SOLUTION = "zero_solution"

    @property
    def hyperbolic(self) -> bool:
        return self in (Stability.ATTRACTING, Stability.REPELLING)


def hyperbolicity(multiplier: float, tau: float = TAU_HYP) -> Stability:
    if multiplier - 1.0 > tau:
        return Stability.REPELLING
    if multiplier - 1.0 < -tau:
        return Stability.ATTRACTING
    return Stability.NON_HYPERBOLIC


@dataclass(frozen=True, eq=False)
class OrbitRecord:
    """A located periodic orbit.

    ``residual`` is ``|Pi(x0) - x0|`` at the reported ``x0`` and
    ``divergence_integral`` the co-integrated ``int h_x`` along the orbit.
    """

    x0: float
    trajectory: Trajectory
    multiplier: float
    stability: Stability
    residual: float = 0.0
    divergence_integral: float = 0.0

    @property
    def hyperbolic(self) -> bool:
        return self.stability.hyperbolic


@dataclass(frozen=True)
class ScanConfig:
    """Grid and tolerances for :func:`find_periodic_orbits`.

    With ``spacing="sinh"`` the nodes are ``s * sinh(u)`` for uniform ``u``
    (``s = sinh_scale``), which packs nodes near the origin where the
    displacement of a multiple zero solution is flat.  The origin is always
    a node when it lies inside the interval.
    """

    x_min: float = -50.0
    x_max: float = 50.0
    n_points: int = 2001
    residual_tol: float = 1e-8
    refine_tol: float = 1e-12
    rel_tol: float = DEFAULT_RTOL
    abs_tol: float = DEFAULT_ATOL
    spacing: str = "sinh"
    sinh_scale: float = 0.05

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got {self.x_min}, {self.x_max}")
        if self.n_points < 3:
            raise ValueError("n_points must be at least 3")
        if self.spacing not in ("sinh", "uniform"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if not (self.residual_tol > 0 and self.refine_tol > 0 and self.sinh_scale > 0):
            raise ValueError("tolerances and sinh_scale must be positive")

    def nodes(self) -> np.ndarray:
        if self.spacing == "uniform":
            x = np.linspace(self.x_min, self.x_max, self.n_points)
        else:
            s = self.sinh_scale
            u = np.linspace(math.asinh(self.x_min / s), math.asinh(self.x_max / s), self.n_points)
            x = s * np.sinh(u)
            x[0], x[-1] = self.x_min, self.x_max
        if self.x_min < 0 < self.x_max:
            x[np.argmin(np.abs(x))] = 0.0
        return x

    def noise_floor(self, x):
        return self.abs_tol + self.rel_tol * np.abs(x)

    def flat_tol(self, x):
        return CENTER_FACTOR * (self.abs_tol + self.rel_tol * np.abs(x))


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Everything a scan produced: the orbits plus the raw displacement."""

    orbits: list[OrbitRecord]
    center_bands: list[tuple[float, float]]
    x0: np.ndarray
    displacement: np.ndarray
    status: np.ndarray
    warnings: list[str] = field(default_factory=list)

    @property
    def nonzero_orbits(self) -> list[OrbitRecord]:
        return [o for o in self.orbits if o.stability is not Stability.ZERO_SOLUTION]


def poincare_map(eq: AbelEquation, x0: float, rel_tol: float = DEFAULT_RTOL,
                 abs_tol: float = DEFAULT_ATOL) -> Union[float, Escaped]:
    """``x(1)`` for ``x(0) = x0``, or the :class:`Escaped` marker."""
    tr = solve_ivp(eq, x0, rel_tol, abs_tol)
    return tr.terminal.x1 if tr.completed else tr.terminal


def _center_bands(x, d, status, cfg) -> list[tuple[int, int]]:
    flat = (status == COMPLETED) & (np.abs(d) <= cfg.flat_tol(x))
    bands = []
    i, n = 0, len(x)
    while i < n:
        if not flat[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flat[j + 1]:
            j += 1
        if j - i + 1 >= CENTER_RUN:
            bands.append((i, j))
        i = j + 1
    return bands


def _refine_roots(eq, a, b, fa, fb, cfg, max_iter=200):
    """Vectorised Illinois iteration on brackets with ``fa * fb < 0``.

    Brackets whose ends fail to evaluate (escape) fall back to bisection.
    Returns the bracket midpoints.
    """
    a, b, fa, fb = (np.array(v, dtype=float) for v in (a, b, fa, fb))
    side = np.zeros(len(a), dtype=int)
    done = np.abs(b - a) <= cfg.refine_tol
    for _ in range(max_iter):
        live = np.nonzero(~done)[0]
        if live.size == 0:
            break
        al, bl, fal, fbl = a[live], b[live], fa[live], fb[live]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = bl - fbl * (bl - al) / (fbl - fal)
        bad = ~np.isfinite(c) | (c <= al) | (c >= bl)
        c = np.where(bad, 0.5 * (al + bl), c)
        x1, st = poincare_batch(eq, c, cfg.rel_tol, cfg.abs_tol)
        fc = x1 - c
        ok = st == COMPLETED
        # an escape inside a bracket between completed ends cannot happen for
        # a monotone map, but guard anyway by shrinking towards the ends
        fc = np.where(ok, fc, np.sign(fbl))
        left = np.sign(fc) == np.sign(fal)
        # below this the sign of d is integration noise
        zero = np.abs(fc) <= 0.01 * (cfg.abs_tol + cfg.rel_tol * np.abs(c))
        na, nb, nfa, nfb = al.copy(), bl.copy(), fal.copy(), fbl.copy()
        na[left], nfa[left] = c[left], fc[left]
        nb[~left], nfb[~left] = c[~left], fc[~left]
        # Illinois: halve the stale end when the same side moves twice
        s = np.where(left, 1, -1)
        stale_b = left & (side[live] == 1)
        stale_a = ~left & (side[live] == -1)
        nfb[stale_b] *= 0.5
        nfa[stale_a] *= 0.5
        side[live] = s
        na[zero], nb[zero] = c[zero], c[zero]
        a[live], b[live], fa[live], fb[live] = na, nb, nfa, nfb
        done[live] = (np.abs(nb - na) <= cfg.refine_tol) | zero
    return 0.5 * (a + b)


def _orbit_records(eq, roots, cfg) -> list[OrbitRecord]:
    if len(roots) == 0:
        return []
    roots = np.asarray(roots, dtype=float)
    x1, v1, D, st = solve_with_variation_batch(eq, roots, cfg.rel_tol, cfg.abs_tol)
    out = []
    for x0, xe, v, dd, s in zip(roots, x1, v1, D, st):
        if s != COMPLETED:
            continue
        residual = abs(xe - x0)
        if residual > cfg.residual_tol * max(1.0, abs(x0)):
            continue
        tr = solve_ivp(eq, float(x0), cfg.rel_tol, cfg.abs_tol, n_samples=ORBIT_SAMPLES)
        out.append(OrbitRecord(float(x0), tr, float(v), hyperbolicity(float(v)),
                               float(residual), float(dd)))
    return out


def _zero_orbit(eq: AbelEquation) -> OrbitRecord:
    t = np.linspace(0.0, 1.0, ORBIT_SAMPLES)
    integral = eq.C.integrate(0.0, 1.0)
    return OrbitRecord(0.0, Trajectory(t, np.zeros_like(t), Completed(0.0)),
                       math.exp(integral), Stability.ZERO_SOLUTION, 0.0, integral)


def scan_periodic_orbits(eq: AbelEquation, cfg: ScanConfig | None = None) -> ScanResult:
    """Scan ``d(x0) = Pi(x0) - x0`` on the configured grid and refine its
    sign changes into periodic orbits.

    Roots are only bracketed between consecutive completed nodes on the same
    side of the origin and outside center bands (runs of at least 64 nodes
    where ``|d|`` sits at integration-noise level).
    """
    cfg = cfg or ScanConfig()
    x = cfg.nodes()
    x1, status = poincare_batch(eq, x, cfg.rel_tol, cfg.abs_tol)
    d = x1 - x
    bands = _center_bands(x, d, status, cfg)
    in_band = np.zeros(len(x), dtype=bool)
    for i, j in bands:
        in_band[i : j + 1] = True

    ok = (status == COMPLETED) & ~in_band & (x != 0.0)
    flips = ok[:-1] & ok[1:] & (np.sign(d[:-1]) * np.sign(d[1:]) < 0)
    # a sign change with both ends inside the integration error is no evidence
    quiet = np.abs(d) <= cfg.noise_floor(x)
    noisy = flips & quiet[:-1] & quiet[1:]
    lo = np.nonzero(flips & ~noisy)[0]
    roots = list(x[ok & (d == 0.0)])
    if lo.size:
        roots.extend(_refine_roots(eq, x[lo], x[lo + 1], d[lo], d[lo + 1], cfg))
    roots = sorted(roots)
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > 10 * cfg.refine_tol:
            deduped.append(r)
    orbits = _orbit_records(eq, deduped, cfg) + [_zero_orbit(eq)]
    orbits.sort(key=lambda o: o.x0)

    warnings = []
    if np.any(noisy):
        warnings.append(f"{int(np.sum(noisy))} sign change(s) below the integration noise floor ignored")
    lost = len(deduped) - (len(orbits) - 1)
    if lost:
        warnings.append(f"{lost} bracketed root(s) failed the residual check")
    if np.any(status == FAILED):
        warnings.append(f"{int(np.sum(status == FAILED))} node(s) failed to integrate")
    return ScanResult(orbits, [(float(x[i]), float(x[j])) for i, j in bands],
                      x, d, status, warnings)


def find_periodic_orbits(eq: AbelEquation, cfg: ScanConfig | None = None) -> list[OrbitRecord]:
    """Periodic orbits found by the scan, including the zero solution, sorted
    by ``x0``.  See :func:`scan_periodic_orbits` for center bands and the raw
    displacement."""
    return scan_periodic_orbits(eq, cfg).orbits


def _divergence_along(eq: AbelEquation, tr: Trajectory) -> np.ndarray:
    return np.asarray(eq.h_x(tr.t, tr.x), dtype=float)


def multiplier_by_formula(eq: AbelEquation, orbit: OrbitRecord, tol: float = 1e-8,
                          max_samples: int = 64001) -> float:
    """``exp(int_0^1 h_x(t, x(t)) dt)`` by Simpson's rule along the orbit.

    Starts from the stored samples; while Simpson at ``dt`` and ``2 dt``
    differ by more than ``15 tol`` the orbit is re-sampled more densely.
    The returned value includes the Richardson correction.
    """
    tr = orbit.trajectory
    if not tr.completed:
        raise ValueError("orbit trajectory did not complete")
    t, x = tr.t, tr.x
    while True:
        uniform = len(t) % 2 == 1 and np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9)
        g = _divergence_along(eq, Trajectory(t, x, tr.terminal))
        fine = float(simpson(g, x=t))
        if not uniform:
            n = ORBIT_SAMPLES
        else:
            coarse = float(simpson(g[::2], x=t[::2]))
            corr = (fine - coarse) / 15.0
            if abs(corr) <= tol or len(t) >= max_samples:
                return math.exp(fine + corr)
            # Simpson's error scales as dt**4
            grow = math.ceil(1.2 * (abs(corr) / tol) ** 0.25)
            n = min(max_samples, 2 * ((len(t) - 1) * max(grow, 2) // 2) + 1)
        tr2 = solve_ivp(eq, orbit.x0, 1e-12, 1e-14, n_samples=n)
        if not tr2.completed:
            raise ValueError("orbit trajectory did not complete on re-sampling")
        t, x = tr2.t, tr2.x


def multiplier_by_finite_difference(eq: AbelEquation, x0: float, delta: float | None = None,
                                    rel_tol: float = 1e-13, abs_tol: float = 1e-14) -> float:
    """Centred difference ``(Pi(x0 + delta) - Pi(x0 - delta)) / (2 delta)``.

    The two differences ``Pi(x0 +- delta) - Pi(x0)`` are integrated directly
    rather than subtracted, so the quotient keeps its relative accuracy when
    ``Pi'`` is far below the resolution of ``Pi`` itself.  A deviation
    ``e = x - x_ref`` from the reference solution never changes sign, and
    ``w = log|e / delta|`` obeys the exact nonlinear quotient

        w' = A (3 x_ref**2 + 3 x_ref e + e**2) + B (2 x_ref + e) + C,

    giving ``(exp(w+) + exp(w-)) / 2`` for the centred difference.
    ``delta`` defaults to ``1e-6 max(1, |x0|)``.
    """
    delta = 1e-6 * max(1.0, abs(x0)) if delta is None else float(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")

    def rhs(t, Y):
        # the third row carries the constant sign of the deviation
        xr, w, sign = Y
        e = sign * delta * np.exp(w)
        A, B, C = eq.A(t), eq.B(t), eq.C(t)
        dxr = eq.h(t, xr)
        dw = A * (3.0 * xr * xr + 3.0 * xr * e + e * e) + B * (2.0 * xr + e) + C
        return np.stack([dxr, dw, np.zeros_like(xr)])

    y0 = np.array([[x0, x0], [0.0, 0.0], [1.0, -1.0]])
    res = integrate_batch(rhs, y0, rtol=rel_tol, atol=abs_tol)
    if np.any(res.status != COMPLETED):
        raise ValueError(f"solutions near x0 = {x0!r} do not complete")
    return float(0.5 * np.sum(np.exp(res.y[1])))


# ---------------------------------------------------------------------------
# weighted divergence


class InvalidWeightError(ValueError):
    """The weight vanishes (or is not positive) somewhere along the orbit."""


@dataclass(frozen=True)
class TimeOnly:
    """Weight ``g(t, x) = p(t)`` with ``p > 0``."""

    p: CoefficientFunction

    def log_abs(self, t, x):
        v = np.asarray(self.p(t), dtype=float)
        if np.any(v <= 0):
            raise InvalidWeightError("time weight must be strictly positive")
        return np.log(v)

    def log_rate(self, eq, t, x):
        """``(g_t + g_x h) / g``."""
        return np.asarray(self.p.derivative(t), dtype=float) / np.asarray(self.p(t), dtype=float)


@dataclass(frozen=True)
class SeparablePower:
    """Weight ``g(t, x) = |f(x)|**(1/w)`` for a polynomial ``f``.

    ``f_poly`` holds the coefficients of ``f`` in increasing powers of ``x``.
    """

    f_poly: tuple[float, ...]
    w: float

    def __post_init__(self):
        object.__setattr__(self, "f_poly", tuple(float(c) for c in self.f_poly))
        if self.w == 0:
            raise ValueError("exponent w must be non-zero")

    @classmethod
    def dulac(cls, a: float, b: float, w: float = -1.0) -> "SeparablePower":
        """``f = x**2 (b x - a)``."""
        return cls((0.0, 0.0, -a, b), w)

    def f(self, x):
        return np.polynomial.polynomial.polyval(x, self.f_poly)

    def f_x(self, x):
        return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(self.f_poly))

    def mw(self, eq: AbelEquation, t, x):
        """``M_w = f_x h + w f h_x`` (``f`` has no explicit time dependence)."""
        h, hx = eq.h_and_h_x(t, x)
        return self.f_x(x) * h + self.w * self.f(x) * hx

    def log_abs(self, t, x):
        fx = np.asarray(self.f(x), dtype=float)
        scale = max(1.0, float(np.max(np.abs(x)))) ** (len(self.f_poly) - 1)
        if np.any(np.abs(fx) <= 1e-12 * scale):
            raise InvalidWeightError("weight polynomial vanishes on the orbit")
        return np.log(np.abs(fx)) / self.w

    def log_rate(self, eq, t, x):
        return self.f_x(x) * eq.h(t, x) / (self.w * self.f(x))


WeightFunction = Union[TimeOnly, SeparablePower]


def weighted_divergence_integrand(eq: AbelEquation, g: WeightFunction, t, x):
    """``div(g X) / g`` along ``(t, x)`` where ``X = (1, h)``."""
    return g.log_rate(eq, t, x) + eq.h_x(t, x)


def weighted_divergence_check(eq: AbelEquation, orbit: OrbitRecord,
                              g: WeightFunction) -> tuple[float, float]:
    """Both sides of ``log Pi' = log|g(0,x0)| - log|g(1,x1)| + int div(g X)/g dt``.

    ``lhs`` is the log of the orbit's variational multiplier; the right side
    is evaluated pointwise along the stored trajectory with Simpson's rule.

    Raises
    ------
    InvalidWeightError
        If ``g`` vanishes on the trajectory.
    """
    tr = orbit.trajectory
    if not tr.completed:
        raise ValueError("orbit trajectory did not complete")
    lg = g.log_abs(tr.t, tr.x)
    integrand = weighted_divergence_integrand(eq, g, tr.t, tr.x)
    rhs = float(lg[0] - lg[-1] + simpson(integrand, x=tr.t))
    return math.log(orbit.multiplier), rhs


# ---------------------------------------------------------------------------
# the zero solution


@dataclass(frozen=True)
class CenterBand:
    evidence: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class SemiStable:
    """Multiplicity-two zero solution; orbits on the ``sign`` side of 0 move away."""

    sign: int
    evidence: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def multiplicity(self) -> int:
        return 2


@dataclass(frozen=True)
class OrdinaryMultiplicity:
    """Zero solution of multiplicity ``k``; ``exact=False`` means "k or higher"."""

    k: int
    exact: bool = True
    evidence: dict = field(default_factory=dict, compare=False, repr=False)


def classify_zero(eq: AbelEquation, probe_radius: float = 1e-2, n_probes: int = 64,
                  rel_tol: float = DEFAULT_RTOL, abs_tol: float = DEFAULT_ATOL):
    """Classify the zero solution from the Lyapunov constants, backed by a
    least-squares fit of ``Pi(x) - x`` at ``n_probes`` points in
    ``[-probe_radius, probe_radius]``.

    Requires ``C = 0`` (raises :class:`lyapunov.UnsupportedFamilyError`).
    """
    if not probe_radius > 0:
        raise ValueError("probe_radius must be positive")
    consts = lyapunov.lyapunov_constants(eq)
    xs = np.linspace(-probe_radius, probe_radius, n_probes)
    x1, st = poincare_batch(eq, xs, rel_tol, abs_tol)
    if np.any(st != COMPLETED):
        raise ValueError("probe solutions must complete; reduce probe_radius")
    d = x1 - xs
    flat = bool(np.all(np.abs(d) <= CENTER_FACTOR * (abs_tol + rel_tol * np.abs(xs))))
    fit = np.polynomial.polynomial.polyfit(xs / probe_radius, d, 5)
    fit = fit / probe_radius ** np.arange(6)
    evidence = {"v2": consts.v2, "v3": consts.v3, "v4": consts.v4,
                "fit": tuple(float(c) for c in fit), "flat": flat,
                "method": consts.method.value}
    first = consts.first_nonzero()
    if first == 2:
        return SemiStable(int(np.sign(consts.v2)), evidence)
    if first in (3, 4):
        return OrdinaryMultiplicity(first, True, evidence)
    if consts.center_verdict is lyapunov.CenterVerdict.CENTER:
        return CenterBand(evidence)
    if flat:
        return CenterBand(evidence)
    return OrdinaryMultiplicity(4, False, evidence)
