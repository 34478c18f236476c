"""First-order bifurcation of periodic orbits from a center.

The unperturbed equation ``x' = 2 pi b1 cos(2 pi t) x**2`` has the center
solutions ``x0(t; rho) = rho / (1 - rho b1 sin(2 pi t))`` for ``|b1 rho| < 1``.
Adding ``eps [(a0 + a1 cos + a2 sin) x**3 + b0 x**2]`` gives

    Pi(rho) - rho = eps rho**2 What(rho) + O(eps**2),

    What(rho) = int_0^1 b0 + (a0 + a1 cos + a2 sin) rho / (1 - b1 rho sin) dt,

so simple zeros of ``What`` continue to periodic orbits for small ``eps``.
With ``b1 rho = sin y`` the integral is

    What = (a0 sin y + (b0 b1 - a2) cos y + a2) / (b1 cos y),

independent of ``a1`` (its integrand is odd about ``t = 1/4``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

from .coeffs import TWO_PI, AbelEquation, TrigPoly, abel
from .poincare import OrbitRecord, ScanConfig, scan_periodic_orbits

__all__ = [
    "OutOfBandError",
    "PerturbationParams",
    "BifurcationRoot",
    "ValidationRecord",
    "Reconciliation",
    "PUBLISHED_EXAMPLE",
    "center_solution",
    "w_hat_quadrature",
    "w_hat_closed_form",
    "closed_form_roots",
    "w_hat_degenerate",
    "predict_bifurcating_orbits",
    "reconcile",
    "validate_against_integration",
]

BAND_MARGIN = 1e-6
QUAD_TOL = 1e-11
EPS_MAX = 0.05


class OutOfBandError(ValueError):
    """``|b1 rho| >= 1``: no center solution through ``rho``."""


@dataclass(frozen=True)
class PerturbationParams:
    b1_tilde: float
    a0_tilde: float = 0.0
    a1_tilde: float = 0.0
    a2_tilde: float = 0.0
    b0_tilde: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.b1_tilde == 0:
            raise ValueError("b1_tilde must be non-zero")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    @property
    def band(self) -> float:
        """Half-width of the center band, ``1 / |b1|``."""
        return 1.0 / abs(self.b1_tilde)

    def equation(self, epsilon: float | None = None) -> AbelEquation:
        eps = self.epsilon if epsilon is None else epsilon
        A = TrigPoly(eps * self.a0_tilde, (eps * self.a1_tilde,), (eps * self.a2_tilde,))
        B = TrigPoly(eps * self.b0_tilde, (TWO_PI * self.b1_tilde,), (0.0,))
        return abel(A, B)

    def with_epsilon(self, epsilon: float) -> "PerturbationParams":
        return replace(self, epsilon=epsilon)


# published example: a0 = 0, b0 b1 - a2 = 1, a2 = 3/4 (b1 = 1)
PUBLISHED_EXAMPLE = PerturbationParams(b1_tilde=1.0, a0_tilde=0.0, a2_tilde=0.75, b0_tilde=1.75)


def _check_band(p: PerturbationParams, rho: float) -> None:
    if not abs(p.b1_tilde * rho) < 1:
        raise OutOfBandError(f"|b1*rho| = {abs(p.b1_tilde * rho):.6g} is not below 1")


def center_solution(p: PerturbationParams, rho: float, t):
    """``rho / (1 - rho b1 sin(2 pi t))``."""
    _check_band(p, rho)
    out = rho / (1.0 - rho * p.b1_tilde * np.sin(TWO_PI * np.asarray(t, dtype=float)))
    return out if np.ndim(out) else float(out)


def w_hat_quadrature(p: PerturbationParams, rho: float) -> float:
    """Adaptive quadrature of the bifurcation integrand (tolerance 1e-11)."""
    _check_band(p, rho)
    beta = p.b1_tilde * rho

    def f(t):
        s, c = math.sin(TWO_PI * t), math.cos(TWO_PI * t)
        return (p.a0_tilde + p.a1_tilde * c + p.a2_tilde * s) * rho / (1.0 - beta * s)

    # the denominator is smallest at t = 1/4 or 3/4
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=500,
                            points=(0.25, 0.75))
    return p.b0_tilde + val


def w_hat_closed_form(p: PerturbationParams, rho: float) -> float:
    _check_band(p, rho)
    y = math.asin(p.b1_tilde * rho)
    num = p.a0_tilde * math.sin(y) + (p.b0_tilde * p.b1_tilde - p.a2_tilde) * math.cos(y) + p.a2_tilde
    return num / (p.b1_tilde * math.cos(y))


def closed_form_roots(p: PerturbationParams) -> list[float]:
    """Zeros of the closed-form numerator on ``y`` in ``(-pi/2, pi/2)``, as ``rho``.

    ``a0 sin y + c cos y = -a2`` with ``c = b0 b1 - a2`` is
    ``R cos(y - delta) = -a2``.
    """
    c = p.b0_tilde * p.b1_tilde - p.a2_tilde
    R = math.hypot(p.a0_tilde, c)
    if R == 0.0:
        return []
    ratio = -p.a2_tilde / R
    if abs(ratio) > 1:
        return []
    delta = math.atan2(p.a0_tilde, c)
    phi = math.acos(ratio)
    ys = set()
    for y in (delta + phi, delta - phi):
        y = (y + math.pi) % (2 * math.pi) - math.pi
        if abs(y) < math.pi / 2 and abs(math.sin(y)) <= 1 - BAND_MARGIN:
            ys.add(round(y, 15))
    roots = sorted(math.sin(y) / p.b1_tilde for y in ys)
    return [r for r in roots if r != 0.0]


def w_hat_degenerate(p: PerturbationParams) -> bool:
    """``What`` vanishes identically (all perturbation coefficients zero except ``a1``)."""
    return p.a0_tilde == 0.0 and p.a2_tilde == 0.0 and p.b0_tilde == 0.0


@dataclass(frozen=True)
class BifurcationRoot:
    rho: float
    simple: bool
    derivative: float


def _rho_grid(p: PerturbationParams, n: int) -> np.ndarray:
    ylim = math.asin(1.0 - BAND_MARGIN)
    y = np.linspace(-ylim, ylim, n)
    return np.sin(y) / p.b1_tilde


def predict_bifurcating_orbits(p: PerturbationParams, method: str = "quadrature",
                               n_grid: int = 801) -> list[BifurcationRoot]:
    """Zeros of ``What`` on ``|b1 rho| <= 1 - 1e-6`` excluding ``rho = 0``.

    ``method`` selects ``"quadrature"`` (the reference) or ``"closed_form"``.
    Simplicity is decided from a centred finite difference of ``What``.
    """
    if method not in ("quadrature", "closed_form"):
        raise ValueError(f"unknown method {method!r}")
    if w_hat_degenerate(p):
        return []
    fn = w_hat_quadrature if method == "quadrature" else w_hat_closed_form
    rho = np.sort(_rho_grid(p, n_grid))
    vals = np.array([fn(p, r) for r in rho])
    roots = []
    zero_scale = QUAD_TOL * max(1.0, abs(p.a0_tilde) + abs(p.a1_tilde) + abs(p.a2_tilde)
                                + abs(p.b0_tilde))
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        r = optimize.brentq(lambda s: fn(p, s), rho[i], rho[i + 1], xtol=1e-14)
        if r == 0.0:
            continue
        h = 1e-6 * p.band
        lim = (1.0 - BAND_MARGIN) * p.band
        lo, hi = max(r - h, -lim), min(r + h, lim)
        der = (fn(p, hi) - fn(p, lo)) / (hi - lo)
        roots.append(BifurcationRoot(float(r), abs(der) > 1e3 * zero_scale, float(der)))
    return roots


@dataclass(frozen=True)
class Reconciliation:
    """Quadrature versus closed form for one parameter set."""

    params: PerturbationParams
    quadrature_roots: tuple[float, ...]
    closed_form_roots: tuple[float, ...]
    max_discrepancy: float
    note: str


def reconcile(p: PerturbationParams, n_probe: int = 201) -> Reconciliation:
    """Compare both evaluations of ``What`` on a probe grid and their roots."""
    rho = _rho_grid(p, n_probe)
    diff = max(abs(w_hat_quadrature(p, r) - w_hat_closed_form(p, r)) for r in rho)
    q = tuple(r.rho for r in predict_bifurcating_orbits(p, "quadrature"))
    c = tuple(closed_form_roots(p))
    c_ratio = p.b0_tilde * p.b1_tilde - p.a2_tilde
    R = math.hypot(p.a0_tilde, c_ratio)
    parts = [f"quadrature finds {len(q)} root(s), closed form {len(c)}",
             f"max |quadrature - closed form| = {diff:.3g} on {n_probe} probes"]
    if R > 0:
        parts.append(f"root condition R cos(y - delta) = -a2 with -a2/R = {-p.a2_tilde / R:.6g}")
    if len(q) != len(c):
        parts.append("INCONSISTENT root counts")
    return Reconciliation(p, q, c, diff, "; ".join(parts))


@dataclass(frozen=True)
class ValidationRecord:
    """One predicted root matched against integration at ``eps`` and ``eps/2``."""

    rho_predicted: float
    x0_found: float | None
    gap: float | None
    x0_found_half: float | None = None
    gap_half: float | None = None
    multiplier: float | None = None

    @property
    def gap_ratio(self) -> float | None:
        if self.gap is None or not self.gap_half:
            return None
        return self.gap / self.gap_half


def _perturbed_orbits(p: PerturbationParams, eps: float, n_points: int,
                      tol: float) -> list[OrbitRecord]:
    w = 0.95 * p.band
    cfg = ScanConfig(-w, w, n_points, residual_tol=1e-10, refine_tol=1e-13,
                     rel_tol=tol, abs_tol=tol, spacing="uniform")
    return scan_periodic_orbits(p.equation(eps), cfg).nonzero_orbits


def validate_against_integration(p: PerturbationParams, n_points: int = 401,
                                 tol: float = 1e-12) -> tuple[list[ValidationRecord], list[OrbitRecord]]:
    """Integrate the perturbed equation at ``eps`` and ``eps/2`` and match
    the orbits found to the predicted roots.

    Returns the per-root records and the orbits found at ``eps`` (so callers
    can check that nothing unpredicted appeared).  ``eps = 0`` is the center
    itself and returns no records.
    """
    eps = p.epsilon
    if eps == 0.0:
        return [], []
    if not 0 < eps <= EPS_MAX:
        raise ValueError(f"epsilon must lie in (0, {EPS_MAX}]")
    roots = predict_bifurcating_orbits(p)
    full = _perturbed_orbits(p, eps, n_points, tol)
    half = _perturbed_orbits(p, eps / 2, n_points, tol)

    def nearest(orbits, rho):
        if not orbits:
            return None
        return min(orbits, key=lambda o: abs(o.x0 - rho))

    records = []
    for r in roots:
        o1, o2 = nearest(full, r.rho), nearest(half, r.rho)
        records.append(ValidationRecord(
            r.rho,
            None if o1 is None else o1.x0,
            None if o1 is None else abs(o1.x0 - r.rho),
            None if o2 is None else o2.x0,
            None if o2 is None else abs(o2.x0 - r.rho),
            None if o1 is None else o1.multiplier,
        ))
    return records, full
