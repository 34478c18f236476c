"""Initial-value problems for the Abel equation on t in [0, 1].

The stepper is the Dormand-Prince 5(4) pair with a PI step-size controller
and its free fourth-order continuous extension.  It advances a *batch* of
independent trajectories at once: every column of the state array carries
its own time and step size, so a batch run returns exactly what the same
initial conditions would give one at a time.  This is what makes dense
Poincare-map scans affordable in numpy.

Trajectories whose first component exceeds ``X_MAX`` in modulus are stopped
and reported as escaped; Abel solutions can blow up in finite time and such
solutions are never periodic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coeffs import AbelEquation

X_MAX = 1e6
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10
N_DENSE = 201
H_MIN = 1e-14

COMPLETED, ESCAPED, FAILED = 0, 1, 2

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension, columns are powers theta**1 .. theta**4
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

# PI controller (Gustafsson), exponents for a 5th-order error estimate
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_DIP_GRID = np.linspace(0.0, 1.0, 33)[1:-1]


class IntegrationError(RuntimeError):
    """Step size underflow; carries the last accepted state."""

    def __init__(self, message: str, t: float, state):
        super().__init__(message)
        self.t = t
        self.state = state


class NoDerivativeError(RuntimeError):
    """The trajectory escaped, so the Poincare map has no derivative there."""


def _check_tolerances(rtol: float, atol: float) -> None:
    for name, v in (("rel_tol", rtol), ("abs_tol", atol)):
        if not 1e-14 <= v <= 1e-3:
            raise ValueError(f"{name} must lie in [1e-14, 1e-3], got {v}")


@dataclass
class BatchResult:
    y: np.ndarray          # (m, n) state at t_stop
    t_stop: np.ndarray     # (n,)
    status: np.ndarray     # (n,) COMPLETED / ESCAPED / FAILED
    n_steps: np.ndarray    # (n,) accepted steps
    samples: np.ndarray | None = None   # (m, n, len(sample_times)), nan past t_stop


def _rms(err: np.ndarray) -> np.ndarray:
    return np.sqrt(np.mean(err * err, axis=0))


def _initial_step(rhs, t, y, f, rtol, atol, t_end):
    scale = atol + rtol * np.abs(y)
    d0 = _rms(y / scale)
    d1 = _rms(f / scale)
    with np.errstate(over="ignore"):
        h0 = np.where((d0 < 1e-5) | (d1 < 1e-5), 1e-6, 0.01 * d0 / np.maximum(d1, 1e-300))
    h0 = np.minimum(h0, t_end - t)
    y1 = y + h0 * f
    f1 = rhs(t + h0, y1)
    d2 = _rms((f1 - f) / scale) / h0
    dmax = np.maximum(d1, d2)
    h1 = np.where(dmax <= 1e-15, np.maximum(1e-6, h0 * 1e-3), (0.01 / np.maximum(dmax, 1e-300)) ** 0.2)
    return np.minimum(np.minimum(100 * h0, h1), t_end - t)


def _dense(y, h, K, theta):
    """Continuous extension at fraction ``theta`` of each column's step."""
    theta = np.broadcast_to(np.asarray(theta, dtype=float), h.shape)
    powers = np.stack([theta, theta**2, theta**3, theta**4])       # (4, k)
    Q = np.einsum("smk,sp->pmk", K, _P)                            # (4, m, k)
    return y + h * np.einsum("pmk,pk->mk", Q, powers)


class Chart:
    """Coordinates the stepper integrates in; the identity by default.

    A chart may change the coordinates of individual columns between steps
    (see :class:`AbelChart`) and decides when a column has escaped.
    """

    def __init__(self, rhs, escape_bound: float = X_MAX):
        self._rhs = rhs
        self.escape_bound = escape_bound

    def rhs(self, t, Y, cols):
        return self._rhs(t, Y)

    def atol_factor(self, cols):
        return 1.0

    def escaped(self, Y, cols):
        return ~(np.abs(Y[0]) <= self.escape_bound)

    def switch(self, Y, cols):
        """Re-chart columns in place; returns the mask of changed columns."""
        return None

    def output(self, Y, cols):
        return Y

    def sure_escape(self, Y, cols):
        return np.zeros(Y.shape[1], dtype=bool)

    def interior_escape(self, y0, h, K, cols):
        """Columns that escaped strictly inside an accepted step although
        both ends are finite, with the step fraction of the deepest point."""
        return np.zeros(len(cols), dtype=bool), np.ones(len(cols))

    def certify(self, t, Y, cols):
        """Columns whose escape is already certain, with escape-time estimates."""
        return None, None

    def direction(self, Y, cols):
        return np.sign(self.output(Y, cols)[0])


class AbelChart(Chart):
    """Flow of ``x' = h(t, x)`` with ``z = 1/x**2`` far from the origin.

    Near a blow-up ``z`` decreases almost linearly to zero, so escapes cost a
    handful of steps instead of thousands.  Columns switch to ``z`` once
    ``|x| > enter`` and back once ``|x| < leave``.
    """

    def __init__(self, eq: AbelEquation, n: int, escape_bound: float = X_MAX,
                 enter: float = 4.0, leave: float = 2.0):
        super().__init__(None, escape_bound)
        self.eq = eq
        self.far = np.zeros(n, dtype=bool)
        self.sgn = np.ones(n)
        self.enter, self.leave = enter, leave
        self.z_escape = 1.0 / escape_bound**2
        self.z_certify = 1e-6
        self._bounds = (eq.A.bounds, eq.B.bounds, eq.C.bounds)

    def rhs(self, t, Y, cols):
        far = self.far[cols]
        y = Y[0]
        if not far.any():
            return self.eq.h(t, y)[None, :]
        out = np.empty_like(Y)
        near = ~far
        if near.any():
            out[0, near] = self.eq.h(t[near], y[near])
        tf, z = t[far], y[far]
        rz = np.sqrt(np.maximum(z, 0.0))
        dz = self.eq.A(tf) + self.eq.B(tf) * self.sgn[cols][far] * rz
        if not self.eq.C.is_zero:
            dz = dz + self.eq.C(tf) * z
        out[0, far] = -2.0 * dz
        return out

    def atol_factor(self, cols):
        # relative control in z is relative control in x
        return np.where(self.far[cols], 1e-8, 1.0)

    def escaped(self, Y, cols):
        far = self.far[cols]
        y = Y[0]
        return np.where(far, ~(y >= self.z_escape), ~(np.abs(y) <= self.escape_bound))

    def switch(self, Y, cols):
        y = Y[0]
        far = self.far[cols]
        to_far = ~far & (np.abs(y) > self.enter)
        to_near = far & (y > 1.0 / self.leave**2)
        if to_far.any():
            c = cols[to_far]
            self.sgn[c] = np.sign(y[to_far])
            Y[0, to_far] = 1.0 / y[to_far] ** 2
            self.far[c] = True
        if to_near.any():
            c = cols[to_near]
            Y[0, to_near] = self.sgn[c] / np.sqrt(y[to_near])
            self.far[c] = False
        return to_far | to_near

    def sure_escape(self, Y, cols):
        return self.far[cols]

    def interior_escape(self, y0, h, K, cols):
        # z is smooth through a blow-up, so a step can cross the whole
        # interval where z < 0; check the dense quartic between the ends
        n = len(cols)
        dip = np.zeros(n, dtype=bool)
        theta_dip = np.ones(n)
        far = np.nonzero(self.far[cols])[0]
        if not far.size:
            return dip, theta_dip
        Q = np.einsum("smk,sp->pk", K[:, :1, far], _P)               # (4, k)
        coef = h[far] * Q                                            # z = y0 + sum coef_p theta**p
        # z(theta) >= z0 - sum |coef_p| on [0, 1]
        maybe = y0[0, far] - np.abs(coef).sum(axis=0) < self.z_escape
        if not maybe.any():
            return dip, theta_dip
        far, coef = far[maybe], coef[:, maybe]
        theta = _DIP_GRID[:, None]
        z_grid = y0[0, far] + sum(coef[p] * theta ** (p + 1) for p in range(4))
        i_min = np.argmin(z_grid, axis=0)
        cand = np.nonzero(z_grid[i_min, np.arange(far.size)] < np.minimum(y0[0, far], y0[0, far] + coef.sum(axis=0)))[0]
        for c in cand:
            # stationary points of the quartic in (0, 1)
            r = np.roots([4 * coef[3, c], 3 * coef[2, c], 2 * coef[1, c], coef[0, c]])
            r = r[(np.abs(r.imag) < 1e-12) & (r.real > 0) & (r.real < 1)].real
            pts = np.concatenate([r, [_DIP_GRID[i_min[c]]]])
            zs = y0[0, far[c]] + sum(coef[p, c] * pts ** (p + 1) for p in range(4))
            k = int(np.argmin(zs))
            if not zs[k] >= self.z_escape:
                dip[far[c]] = True
                theta_dip[far[c]] = pts[k]
        return dip, theta_dip

    def certify(self, t, Y, cols):
        # While z <= z0, z' <= -r with r = 2 (A(t0) - L_A T - |B| sqrt(z0) - |C| z0),
        # so z reaches 0 within z0 / r.  Accepted when that fits in T = 2 z0 / r0.
        z = Y[0]
        cand = self.far[cols] & (z < self.z_certify)
        if not cand.any():
            return None, None
        (_, la), (mb, _), (mc, _) = self._bounds
        idx = np.nonzero(cand)[0]
        tc, zc = t[idx], z[idx]
        a = self.eq.A(tc)
        rz = np.sqrt(zc)
        r0 = 2.0 * (a - mb * rz - mc * zc)
        with np.errstate(divide="ignore", invalid="ignore"):
            T = 2.0 * zc / r0
            ok = (r0 > 0) & (tc + T < 1.0) & (2.0 * la * T <= 0.25 * r0)
        ok_cols = np.zeros(len(cols), dtype=bool)
        ok_cols[idx[ok]] = True
        rate = 2.0 * (a + self.eq.B(tc) * self.sgn[cols][idx] * rz
                      + (self.eq.C(tc) * zc if not self.eq.C.is_zero else 0.0))
        t_esc = np.full(len(cols), np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_esc[idx] = tc + np.clip((zc - self.z_escape) / rate, 0.0, T)
        return ok_cols, t_esc

    def output(self, Y, cols):
        far = self.far[cols]
        if not far.any():
            return Y
        out = Y.copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            out[0, far] = self.sgn[cols][far] / np.sqrt(Y[0, far])
        return out

    def direction(self, Y, cols):
        return np.where(self.far[cols], self.sgn[cols], np.sign(Y[0]))


def integrate_batch(
    rhs,
    y0,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    t_end: float = 1.0,
    escape_bound: float = X_MAX,
    sample_times=None,
    max_steps: int = 200_000,
) -> BatchResult:
    """Integrate independent trajectories from ``t=0`` to ``t_end``.

    Parameters
    ----------
    rhs : callable or Chart
        ``rhs(t, Y)`` with ``t`` of shape ``(k,)`` and ``Y`` of shape
        ``(m, k)``; returns the derivative with the shape of ``Y``.  A
        :class:`Chart` may be passed instead to integrate in other
        coordinates.
    y0 : array_like
        Initial states, shape ``(m, n)``: ``m`` components, ``n`` trajectories.
    escape_bound : float
        A trajectory stops as escaped once ``|Y[0]|`` exceeds this bound
        (ignored when a chart is given; the chart owns its bound).
    sample_times : array_like, optional
        Sorted times in ``[0, t_end]`` at which to record the dense output.

    Returns
    -------
    BatchResult
        States at the stopping times in the natural coordinates.
    """
    _check_tolerances(rtol, atol)
    chart = rhs if isinstance(rhs, Chart) else Chart(rhs, escape_bound)
    y = np.array(y0, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    m, n = y.shape
    t = np.zeros(n)
    status = np.full(n, -1)
    n_steps = np.zeros(n, dtype=int)
    samples = None
    if sample_times is not None:
        sample_times = np.asarray(sample_times, dtype=float)
        samples = np.full((m, n, len(sample_times)), np.nan)
        samples[:, :, sample_times <= 0.0] = y[:, :, None]

    allc = np.arange(n)
    escaped0 = chart.escaped(y, allc)
    status[escaped0] = ESCAPED
    chart.switch(y, allc)
    f = chart.rhs(t, y, allc)
    h = _initial_step(lambda tt, yy: chart.rhs(tt, yy, allc), t, y, f, rtol,
                      atol * chart.atol_factor(allc), t_end)
    err_prev = np.full(n, 1e-4)
    active = allc[~escaped0]

    it = 0
    while active.size:
        it += 1
        if it > max_steps:
            status[active] = FAILED
            break
        ta, ya, fa = t[active], y[:, active], f[:, active]
        ha = np.minimum(h[active], t_end - ta)
        K = [fa]
        with np.errstate(all="ignore"):
            for s in range(1, 6):
                yi = ya + ha * sum(a * K[j] for j, a in enumerate(_A[s]))
                K.append(chart.rhs(ta + _C[s] * ha, yi, active))
            y_new = ya + ha * sum(b * K[j] for j, b in enumerate(_B) if b)
            f_new = chart.rhs(ta + ha, y_new, active)
            K.append(f_new)
            K = np.stack(K)
            err_vec = ha * np.einsum("s,smk->mk", _E, K)
            scale = atol * chart.atol_factor(active) + rtol * np.maximum(np.abs(ya), np.abs(y_new))
            err = _rms(err_vec / scale)
        finite = np.all(np.isfinite(y_new), axis=0) & np.all(np.isfinite(f_new), axis=0) & np.isfinite(err)
        err = np.where(finite, err, np.inf)
        accept = err <= 1.0
        # a step that jumps over a pole is accepted once both embedded
        # solutions agree that the column escaped
        sure = ~accept & chart.escaped(y_new, active) & chart.escaped(y_new - err_vec, active)
        if sure.any():
            sure &= chart.sure_escape(ya, active)
            accept |= sure

        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            fac_acc = np.where(err == 0.0, _FAC_MAX,
                               _SAFETY * err ** (-_ALPHA) * err_prev[active] ** _BETA)
            fac_rej = np.where(np.isfinite(err), _SAFETY * err ** (-0.2), _FAC_MIN)
        fac = np.where(accept, np.clip(fac_acc, _FAC_MIN, _FAC_MAX), np.clip(fac_rej, _FAC_MIN, 1.0))
        h_next = ha * fac

        under = ~accept & (h_next < H_MIN)
        if np.any(under):
            status[active[under]] = FAILED

        acc = np.nonzero(accept)[0]
        if acc.size:
            cols = active[acc]
            t_new = ta[acc] + ha[acc]
            t_new = np.where(t_end - t_new <= 1e-13, t_end, t_new)
            yn = y_new[:, acc]
            Ka = K[:, :, acc]
            if samples is not None:
                _record_samples(chart, samples, sample_times, cols, ta[acc], t_new, ha[acc],
                                ya[:, acc], Ka)
            esc = chart.escaped(yn, cols)
            dip, theta_dip = chart.interior_escape(ya[:, acc], ha[acc], Ka, cols)
            dip &= ~esc
            theta_dip[esc] = 1.0
            esc |= dip
            if np.any(esc):
                t_new[esc] = _escape_time(chart, cols[esc], ta[acc][esc], ha[acc][esc],
                                          ya[:, acc][:, esc], Ka[:, :, esc], theta_dip[esc])
            t[cols] = t_new
            y[:, cols] = yn
            f[:, cols] = f_new[:, acc]
            err_prev[cols] = np.maximum(err[acc], 1e-10)
            n_steps[cols] += 1
            status[cols[esc]] = ESCAPED
            status[cols[~esc & (t_new >= t_end)]] = COMPLETED
            live = status[cols] < 0
            if live.any():
                lc = cols[live]
                yl = y[:, lc]
                changed = chart.switch(yl, lc)
                if changed is not None and changed.any():
                    y[:, lc] = yl
                    cc = lc[changed]
                    f[:, cc] = chart.rhs(t[cc], y[:, cc], cc)
                    err_prev[cc] = 1e-4
                sure, t_esc = chart.certify(t[lc], y[:, lc], lc)
                if sure is not None and sure.any():
                    t[lc[sure]] = t_esc[sure]
                    status[lc[sure]] = ESCAPED
        h[active] = h_next
        active = active[status[active] < 0]

    out = chart.output(y, allc)
    if status.size and np.any(status == ESCAPED):
        # report the escaping side even when the state is stored as 1/x**2
        sgn = chart.direction(y, allc)
        esc = status == ESCAPED
        out = out.copy()
        out[0, esc] = sgn[esc] * np.fmax(np.abs(out[0, esc]), chart.escape_bound)
    return BatchResult(y=out, t_stop=t, status=status, n_steps=n_steps, samples=samples)


def _record_samples(chart, samples, times, cols, t0, t1, h, y0, K):
    lo = np.searchsorted(times, t0, side="right")
    hi = np.searchsorted(times, t1, side="right")
    for i in np.nonzero(hi > lo)[0]:
        idx = np.arange(lo[i], hi[i])
        theta = (times[idx] - t0[i]) / h[i]
        k = len(idx)
        val = _dense(np.repeat(y0[:, i : i + 1], k, axis=1), np.full(k, h[i]),
                     np.repeat(K[:, :, i : i + 1], k, axis=2), theta)
        val = chart.output(val, np.full(k, cols[i]))
        samples[:, cols[i], idx] = val


def _escape_time(chart, cols, t0, h, y0, K, hi=None):
    """Locate the escape inside the last step by bisection on theta in
    ``(0, hi)``; ``hi`` must be a step fraction where the column is escaped."""
    lo = np.zeros_like(t0)
    hi = np.ones_like(t0) if hi is None else np.array(hi, dtype=float)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        with np.errstate(all="ignore"):
            over = chart.escaped(_dense(y0, h, K, mid), cols)
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    return t0 + hi * h


# ---------------------------------------------------------------------------
# Abel-specific front ends


@dataclass(frozen=True)
class Completed:
    x1: float


@dataclass(frozen=True)
class Escaped:
    t_escape: float
    direction: int


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Dense samples of one solution plus how it ended."""

    t: np.ndarray
    x: np.ndarray
    terminal: Completed | Escaped

    @property
    def completed(self) -> bool:
        return isinstance(self.terminal, Completed)

    @property
    def x1(self) -> float:
        if not self.completed:
            raise NoDerivativeError(f"trajectory escaped at t={self.terminal.t_escape:.6g}")
        return self.terminal.x1

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.x.tolist()))


@dataclass(frozen=True)
class VariationalResult:
    x1: float
    v1: float
    divergence_integral: float


def _variational_rhs(eq: AbelEquation):
    def rhs(t, Y):
        h, hx = eq.h_and_h_x(t, Y[0])
        return np.stack([h, hx * Y[1], hx])
    return rhs


def _raise_failure(res: BatchResult, col: int = 0):
    raise IntegrationError(
        f"step size fell below {H_MIN:g} at t={res.t_stop[col]:.6g}",
        float(res.t_stop[col]), res.y[:, col].copy(),
    )


def solve_ivp(eq: AbelEquation, x0: float, rel_tol: float = DEFAULT_RTOL,
              abs_tol: float = DEFAULT_ATOL, n_samples: int = N_DENSE) -> Trajectory:
    """Integrate ``eq`` from ``x(0) = x0`` and sample on a uniform grid.

    Returns a :class:`Trajectory` ending in :class:`Completed` or
    :class:`Escaped`; raises :class:`IntegrationError` on step underflow.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    grid = np.linspace(0.0, 1.0, n_samples)
    res = integrate_batch(AbelChart(eq, 1), [[float(x0)]], rtol=rel_tol, atol=abs_tol,
                          sample_times=grid)
    st = res.status[0]
    if st == FAILED:
        _raise_failure(res)
    xs = res.samples[0, 0]
    if st == COMPLETED:
        xs[-1] = res.y[0, 0]
        return Trajectory(grid, xs, Completed(float(res.y[0, 0])))
    keep = grid < res.t_stop[0]
    return Trajectory(grid[keep], xs[keep],
                      Escaped(float(res.t_stop[0]), int(np.sign(res.y[0, 0]))))


def solve_with_variation(eq: AbelEquation, x0: float, rel_tol: float = DEFAULT_RTOL,
                         abs_tol: float = DEFAULT_ATOL) -> VariationalResult:
    """Co-integrate ``v' = h_x(t, x) v`` and ``D' = h_x(t, x)`` with the flow.

    ``v1`` is the derivative of the Poincare map at ``x0`` and ``D`` the
    divergence integral, so ``v1 = exp(D)`` up to the tolerances.
    """
    batch = solve_with_variation_batch(eq, [x0], rel_tol, abs_tol)
    st = batch[3][0]
    if st == ESCAPED:
        raise NoDerivativeError(f"solution from x0={x0!r} escapes before t=1")
    if st == FAILED:
        raise IntegrationError(f"step size underflow for x0={x0!r}", float("nan"), None)
    return VariationalResult(float(batch[0][0]), float(batch[1][0]), float(batch[2][0]))


def solve_with_variation_batch(eq: AbelEquation, x0s, rel_tol: float = DEFAULT_RTOL,
                               abs_tol: float = DEFAULT_ATOL):
    """Vectorised :func:`solve_with_variation`: returns ``(x1, v1, D, status)``."""
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    y0 = np.stack([x0s, np.ones_like(x0s), np.zeros_like(x0s)])
    res = integrate_batch(_variational_rhs(eq), y0, rtol=rel_tol, atol=abs_tol)
    done = res.status == COMPLETED
    nan = np.full_like(x0s, np.nan)
    return (np.where(done, res.y[0], nan), np.where(done, res.y[1], nan),
            np.where(done, res.y[2], nan), res.status)


def poincare_batch(eq: AbelEquation, x0s, rel_tol: float = DEFAULT_RTOL,
                   abs_tol: float = DEFAULT_ATOL):
    """Return ``(x1, status)`` for many initial conditions; ``x1`` is nan
    wherever the solution escaped or the integration failed."""
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    res = integrate_batch(AbelChart(eq, len(x0s)), x0s[None, :], rtol=rel_tol, atol=abs_tol)
    x1 = np.where(res.status == COMPLETED, res.y[0], np.nan)
    return x1, res.status


def integrate_system(rhs, y0, *, rtol: float = 1e-12, atol: float = 1e-12,
                     escape_bound: float = np.inf) -> np.ndarray:
    """Integrate a single generic system ``y' = rhs(t, y)`` over [0, 1].

    ``rhs`` takes a scalar ``t`` and a 1-d state.  Used for auxiliary
    quadratures (nested integrals) that are easiest written as an ODE.
    """
    y0 = np.asarray(y0, dtype=float)

    def batch_rhs(t, Y):
        return np.asarray(rhs(t[0], Y[:, 0]), dtype=float)[:, None]

    res = integrate_batch(batch_rhs, y0[:, None], rtol=rtol, atol=atol, escape_bound=escape_bound)
    if res.status[0] != COMPLETED:
        _raise_failure(res)
    return res.y[:, 0]
