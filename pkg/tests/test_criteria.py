import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abel_orbits.coeffs import MonomialPoly, Sign, TrigPoly, abel, linear_combination
from abel_orbits.criteria import (
    DulacData,
    Witness,
    WitnessKind,
    certify_witness,
    corollary_periodic_ends,
    locate_orbit,
    mw_evaluate,
    no_orbit_test_trig1,
    poly3_conditions,
    thm51_check,
    thm51_transform,
    thm52_check,
    thm52_expression,
    thm_a_check,
    trig1_conditions,
    trig1_q_feasible,
    witness_search_thmA,
)
from abel_orbits.lyapunov import Trig1, center_test_trig1
from abel_orbits.poincare import scan_periodic_orbits

coef = st.floats(-3, 3, allow_nan=False)


def trig_eq(a0, a1, a2, b0, b1, b2):
    return Trig1(a0, a1, a2, b0, b1, b2).equation()


class TestMw:
    def test_thm_a_identity(self, rng):
        eq = abel(TrigPoly(0.3, (1.0,), (-2.0,)), MonomialPoly(((0, 1.0), (2, -4.0))))
        a, b = 0.7, -1.9
        t, x = rng.random(500), rng.normal(size=500) * 3
        lhs = mw_evaluate(eq, DulacData.thm_a(a, b), t, x)
        rhs = x**4 * linear_combination(a, eq.A, b, eq.B.sampled())(t)
        np.testing.assert_allclose(lhs, x**4 * (a * eq.A(t) + b * eq.B(t)), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-6, atol=1e-9)

    def test_thm52_display(self, rng):
        eq = abel(TrigPoly(0.3, (1.0,)), TrigPoly(-1.0, (0.0,), (2.0,)), TrigPoly(0.5, (0.25,)))
        a, b, c = 1.2, -0.4, 0.9
        t, x = rng.random(500), rng.normal(size=500)
        A, B, C = eq.A(t), eq.B(t), eq.C(t)
        expect = x**2 * ((a * A + b * B) * x**2 + 2 * (b * C - c * A) * x - (c * B + a * C))
        np.testing.assert_allclose(mw_evaluate(eq, DulacData.thm52(a, b, c), t, x), expect,
                                   rtol=1e-12, atol=1e-13)

    def test_origin(self):
        eq = abel(1.0, 2.0, 3.0)
        assert mw_evaluate(eq, DulacData.thm_a(1.0, 2.0), 0.4, 0.0) == 0.0

    def test_w_nonzero(self):
        with pytest.raises(ValueError):
            DulacData((0.0, 1.0), 0.0)


class TestWitnessSearch:
    def test_a_alone(self):
        w = witness_search_thmA(abel(1.0, TrigPoly(0.0, (3.0,), (1.0,))))
        assert (w.a, w.b, w.kind) == (1.0, 0.0, WitnessKind.PROP28_A_ONLY)

    def test_cos_sin_has_none(self):
        assert witness_search_thmA(trig_eq(0, 1, 0, 0, 0, 1)) is None
        rep = thm_a_check(trig_eq(0, 1, 0, 0, 0, 1))
        assert not rep.applies and rep.orbit_bound is None
        assert "no witness found at this resolution" in rep.notes

    def test_amplitude_condition(self):
        w = witness_search_thmA(trig_eq(2, 1, 0, 0, 5, 0))
        assert (w.a, w.b) == (1.0, 0.0)
        rep = thm_a_check(trig_eq(2, 1, 0, 0, 5, 0))
        assert rep.applies and rep.orbit_bound == 1 and rep.hyperbolic_guarantee

    def test_generic_angular(self):
        # A = cos(4 pi t) + 0.5, B = -cos(4 pi t) + 0.1: A + B = 0.6 > 0 but neither alone
        eq = abel(TrigPoly(0.5, (0.0, 1.0)), TrigPoly(0.1, (0.0, -1.0)))
        w = witness_search_thmA(eq)
        assert w is not None and w.kind is WitnessKind.THM_A
        assert certify_witness(eq, w.a, w.b).definite

    def test_n_angles(self):
        with pytest.raises(ValueError):
            witness_search_thmA(abel(1.0, 1.0), n_angles=8)

    def test_linear_term_rejected(self):
        with pytest.raises(ValueError):
            witness_search_thmA(abel(1.0, 1.0, 1.0))


class TestTrig1Conditions:
    def test_cond_a(self):
        ca, cb, cm, w = trig1_conditions(1, 0, 0, 0, 1, 1)
        assert ca and not cb
        assert (w.a, w.b, w.kind) == (1.0, 0.0, WitnessKind.THM_B_COND1)

    def test_none(self):
        assert trig1_conditions(0, 1, 0, 0, 0, 1) == (False, False, False, None)

    def test_cond_b(self):
        ca, cb, cm, w = trig1_conditions(0, 0, 0, 1, 0, 0)
        assert cb and (w.a, w.b) == (0.0, 1.0)

    def test_mixed_only(self):
        # A = cos + 0.5 sin and B = -cos + 0.2 sin + 0.9 combine into a definite -A + m B
        p = (0.0, 1.0, 0.5, 0.9, -1.0, 0.2)
        ca, cb, cm, w = trig1_conditions(*p)
        assert not ca and not cb and cm
        assert w.a == -1.0 and w.kind is WitnessKind.THM_B_COND3
        assert certify_witness(trig_eq(*p), w.a, w.b).definite

    @settings(max_examples=200)
    @given(st.tuples(coef, coef, coef, coef, coef, coef))
    def test_witness_always_certified(self, p):
        if center_test_trig1(*p):
            return
        ca, cb, cm, w = trig1_conditions(*p)
        if w is not None:
            assert certify_witness(trig_eq(*p), w.a, w.b).definite
        # a witness exists exactly when the exact sign test finds one
        assert trig1_q_feasible(*p) == (ca or cb or cm)


class TestPoly3Conditions:
    def test_cond1_zero_cross(self):
        c1, _, _, w = poly3_conditions(0, 0, 1, 1, 0, 0, 1, 2)
        assert c1 and (w.a, w.b) == (0.0, 1.0) and w.kind is WitnessKind.THM_C_COND1

    def test_proportional(self):
        c = poly3_conditions(1, 1, 1, 1, 1, 1, 1, 2)
        assert c[:3] == (True, True, True)

    def test_boundary_ratio(self):
        c1, _, _, _ = poly3_conditions(0, -1, 2, 0, 2, 1, 1, 2)
        assert c1
        rep = thm_a_check(abel(MonomialPoly.family(0, -1, 2, 1, 2), MonomialPoly.family(0, 2, 1, 1, 2)))
        assert any("boundary" in n for n in rep.notes)

    def test_ratio_inside_interval_fails(self):
        # (a2 b0 - a0 b2) / (a2 b1 - a1 b2) = -1/2
        c1, _, _, _ = poly3_conditions(0, 0, 1, -1, 2, 0, 1, 2)
        assert not c1

    def test_witness_sound(self, rng):
        for _ in range(200):
            c = rng.normal(size=6)
            j, k = 1, int(rng.integers(2, 6))
            w = poly3_conditions(*c, j, k)[3]
            if w is None:
                continue
            eq = abel(MonomialPoly.family(*c[:3], j, k), MonomialPoly.family(*c[3:], j, k))
            assert certify_witness(eq, w.a, w.b).definite


class TestCorollary:
    def test_applies(self):
        rep = corollary_periodic_ends(1, 1, -1, 1, 0, 0, 1, 2)
        assert rep.applies and rep.orbit_bound == 1

    def test_precondition(self):
        assert not corollary_periodic_ends(1, 1, 0, 1, 0, 0, 1, 2).applies

    def test_constants(self):
        rep = corollary_periodic_ends(2.0, 0, 0, -3.0, 0, 0, 1, 2)
        assert rep.applies and rep.orbit_bound == 1
        # x' = 2 x^3 - 3 x^2 has the equilibrium x = 3/2
        nz = scan_periodic_orbits(abel(2.0, -3.0)).nonzero_orbits
        assert len(nz) == 1 and nz[0].x0 == pytest.approx(1.5, abs=1e-9)

    def test_random_ends_always_apply(self, rng):
        for _ in range(50):
            a0, a1, b0, b1 = rng.normal(size=4)
            rep = corollary_periodic_ends(a0, a1, -a1, b0, b1, -b1, 1, int(rng.integers(2, 5)))
            assert rep.applies


class TestThm51:
    def test_reduces_without_c(self):
        rep = thm51_check(abel(1.0, TrigPoly(0.0, (1.0,))))
        assert rep.applies and (rep.witness.a, rep.witness.b) == (1.0, 0.0)

    def test_zero_mean_c(self):
        rep = thm51_check(abel(1.0, TrigPoly(0.0, (2.0,)), TrigPoly(0.0, (0.0,), (1.0,))))
        assert rep.applies and rep.orbit_bound == 1 and rep.hyperbolic_guarantee
        assert (rep.witness.a, rep.witness.b) == (1.0, 0.0)

    def test_nonzero_mean(self):
        rep = thm51_check(abel(1.0, 1.0, 1.0))
        assert not rep.applies and "thm52" in rep.notes[0]

    def test_transform_identity(self):
        eq = abel(1.0, 1.0)
        assert thm51_transform(eq) is eq

    def test_transform_coefficients(self):
        eq = abel(TrigPoly(1.0, (0.5,)), TrigPoly(-0.5), TrigPoly(0.0, (0.0,), (2.0,)))
        out = thm51_transform(eq)
        t = np.linspace(0, 1, 9)
        g = (1 - np.cos(2 * np.pi * t)) * 2 / (2 * np.pi)
        np.testing.assert_allclose(out.A(t), eq.A(t) * np.exp(2 * g), rtol=1e-12)
        np.testing.assert_allclose(out.B(t), eq.B(t) * np.exp(g), rtol=1e-12)
        assert out.C.is_zero


class TestThm52:
    def test_no_linear_term(self):
        rep = thm52_check(abel(1.0, 0.0), 1.0, 0.0, 0.0)
        assert not rep.applies and any("thm_a" in n for n in rep.notes)

    def test_fails_positive(self):
        rep = thm52_check(abel(1.0, 0.0, 1.0), 1.0, 0.0, -1.0)
        assert not rep.applies
        assert rep.details["max_expression"] == pytest.approx(2.0)

    def test_reports_max(self):
        rep = thm52_check(abel(1.0, 0.0, 0.1), 1.0, 0.0, 10.0)
        assert not rep.applies
        assert rep.details["max_expression"] == pytest.approx(100.1)
        assert 0.0 <= rep.details["argmax_t"] <= 1.0

    def test_applies(self):
        # A = 1, B = 0, C = -1, (a, b, c) = (1, 0, 0.5): (0.5)^2 + 1 * (-1) = -0.75 < 0
        eq = abel(1.0, 0.0, -1.0)
        assert thm52_expression(eq, 1.0, 0.0, 0.5, 0.3) == pytest.approx(-0.75)
        rep = thm52_check(eq, 1.0, 0.0, 0.5)
        assert rep.applies and rep.orbit_bound == 4 and not rep.hyperbolic_guarantee
        assert len(scan_periodic_orbits(eq).nonzero_orbits) <= 4


class TestLocation:
    def _region(self, eq, a, b):
        w = Witness(a, b, WitnessKind.THM_A)
        return locate_orbit(eq, w)

    def test_case_i(self):
        eq = abel(TrigPoly(-1.0, (0.5,)), TrigPoly(3.0, (0.0,), (0.2,)))
        r = self._region(eq, 1.0, 1.0)
        assert r.case == "i" and (r.lo, r.hi) == (1.0, math.inf)
        for o in scan_periodic_orbits(eq).nonzero_orbits:
            assert r.contains(o.x0)

    def test_case_ii(self):
        r = self._region(abel(1.0, 1.0), 1.0, 0.5)
        assert r.case == "ii" and (r.lo, r.hi) == (-math.inf, 0.0)

    def test_case_iii(self):
        eq = abel(2.0, -1.0)
        r = self._region(eq, 1.0, 1.0)
        assert r.case == "iii" and r.guaranteed and (r.lo, r.hi) == (0.0, 1.0)
        nz = scan_periodic_orbits(eq).nonzero_orbits
        assert len(nz) == 1 and r.contains(nz[0].x0)

    def test_b_zero(self):
        assert self._region(abel(1.0, 1.0), 1.0, 0.0) is None

    def test_symmetry_flip(self):
        # x -> -x of case iii: A = 2, B = +1 with witness (1, -1)
        eq = abel(2.0, 1.0)
        r = self._region(eq, 1.0, -1.0)
        assert r.flipped_x and r.case == "iii" and (r.lo, r.hi) == (-1.0, 0.0)
        nz = scan_periodic_orbits(eq).nonzero_orbits
        assert len(nz) == 1 and r.contains(nz[0].x0)


class TestNoOrbit:
    def test_examples(self):
        assert not no_orbit_test_trig1(2, 0, 0, 0, 1, 1)
        assert not no_orbit_test_trig1(2, 0, 0, 0, 0, 0)
        assert not no_orbit_test_trig1(0, 0, 0, 0, 0, 0)

    @settings(max_examples=500)
    @given(st.tuples(coef, coef, coef, coef, coef, coef))
    def test_never_satisfiable(self, p):
        # min over a0 of |a0 v - b0 u|^2 is b0^2 (u x v)^2 / |v|^2, so the strict
        # mixed inequality forces b0^2 < |v|^2 (and symmetrically for A)
        assert not no_orbit_test_trig1(*p)
