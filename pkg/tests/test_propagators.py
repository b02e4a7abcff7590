import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from qfq.propagators import (
    DIVERGENT,
    NonadiabaticDivergence,
    QuadratureError,
    _retarded_tail,
    bessel_j1,
    bessel_k1,
    bessel_y1,
    correlation_knots,
    cross_correlation,
    frak_g_keldysh,
    frak_g_retarded,
    g_keldysh_position,
    g_retarded_regular,
    greens_bundle,
    integrate_across_cone,
    keldysh_cross_position,
    keldysh_kernel_cross,
    keldysh_kernel_self,
    panel_quad,
)
from qfq.scenario import CouplingProfile, QuadSettings, Scenario, coupling_at

# Reference values below were computed with mpmath at 20-25 digits.
J1_1 = 0.440050585744933515959682
K1_1 = 0.601907230197234574737540
Y1_1 = -0.781212821300288716547150
GK_SPACELIKE_0_1_1 = 0.0152464882516162198254
GR_REG_2_1_1 = -0.0266207522492906863014
GK_TIMELIKE_2_1_1 = -0.0060867115750928561800

# Symmetric windows: ramps of 2, plateau 4, m = 1, lambda_bar = 1.
SYM_GK_SELF = 0.012463501584180
SYM_GR = {2.0: 0.029956872136853632381, 5.0: 0.0014173249479634767703}
SYM_GK_CROSS = {2.0: 0.0034298127299108625061, 4.0: -0.0012806881356110595257}
# Ramps of 1, plateau 2, m = 1.
SHORT_GK_SELF = 0.037208341435623066803

TIGHT = QuadSettings(abs_tol=1e-13, rel_tol=1e-8)
SYM = CouplingProfile(1.0, 0.0, 2.0, 4.0, 2.0)


def sym(D, quad=TIGHT):
    return Scenario(1.0, D, SYM, SYM, quad)


def test_bessel_wrappers():
    assert np.isclose(bessel_j1(1.0), J1_1, rtol=1e-14)
    assert np.isclose(bessel_k1(1.0), K1_1, rtol=1e-14)
    assert np.isclose(bessel_y1(1.0), Y1_1, rtol=1e-14)
    assert np.allclose(bessel_j1(np.array([1.0, 1.0])), J1_1)


@pytest.mark.parametrize("fn, x", [(bessel_j1, -1.0), (bessel_y1, 0.0), (bessel_k1, 0.0)])
def test_bessel_domain(fn, x):
    with pytest.raises(ValueError):
        fn(x)


def test_position_propagators_against_mpmath():
    assert np.isclose(g_keldysh_position(0.0, 1.0, 1.0), GK_SPACELIKE_0_1_1, rtol=1e-13)
    assert np.isclose(g_retarded_regular(2.0, 1.0, 1.0), GR_REG_2_1_1, rtol=1e-13)
    assert np.isclose(g_keldysh_position(2.0, 1.0, 1.0), GK_TIMELIKE_2_1_1, rtol=1e-13)


def test_retarded_regular_support():
    out = g_retarded_regular(np.array([-2.0, 0.5, 1.0]), 1.0, 1.0)
    assert np.all(out == 0.0)
    # small-argument limit -m^2/(8 pi)
    assert np.isclose(g_retarded_regular(1.0 + 1e-14, 1.0, 2.0), -4.0 / (8 * math.pi))


def test_keldysh_singular_on_cone():
    with pytest.raises(ValueError, match="light cone"):
        g_keldysh_position(1.0, 1.0, 1.0)


def test_keldysh_even_in_time():
    t = np.array([0.3, 2.0, 7.5])
    assert np.allclose(g_keldysh_position(t, 1.2, 0.7), g_keldysh_position(-t, 1.2, 0.7))


@pytest.mark.parametrize("D", [0.5, 2.0, 9.0])
def test_retarded_tail_closed_form(D):
    # with u^2 = dt^2 - D^2 the tail is -m/(4 pi) int_0^inf J1(m u)/sqrt(u^2 + D^2) du
    mp = pytest.importorskip("mpmath")
    m = 1.3
    val = mp.quadosc(lambda u: mp.besselj(1, m * u) / mp.sqrt(u * u + D * D), [0, mp.inf],
                     omega=m)
    ref = -m / (4 * math.pi) * float(val)
    assert np.isclose(_retarded_tail(m, D), ref, rtol=1e-10)


def test_self_kernel_is_cross_with_itself():
    p = CouplingProfile(1.0, 0.3, 1.5, 2.0, 0.7)
    k = np.linspace(0.0, 30.0, 61)
    assert np.allclose(keldysh_kernel_self(k, p, 0.8), keldysh_kernel_cross(k, p, p, 0.8))


def test_cross_kernel_symmetric():
    pa = CouplingProfile(1.0, 0.0, 1.0, 2.0, 3.0)
    pb = CouplingProfile(1.0, 4.0, 2.0, 0.5, 1.0)
    k = np.linspace(0.0, 10.0, 11)
    assert np.allclose(keldysh_kernel_cross(k, pa, pb, 1.0), keldysh_kernel_cross(k, pb, pa, 1.0))


def test_cross_correlation_against_quad():
    pa = CouplingProfile(0.7, 0.0, 1.0, 2.0, 3.0)
    pb = CouplingProfile(1.3, 2.5, 2.0, 0.5, 1.0)
    for tau in (-3.0, 0.0, 1.7, 4.2):
        ref, _ = integrate.quad(lambda t: coupling_at(pb, t) * coupling_at(pa, t - tau),
                                -10, 20, points=[0, 1, 3, 6, 2.5, 4.5, 5], limit=200)
        assert np.isclose(cross_correlation(pb, pa, tau), ref, rtol=1e-10, atol=1e-14)


def test_cross_correlation_infinite_past():
    pa = CouplingProfile.ending_at(3.0, 1.0, 0.0, 1.0, 2.0, infinite_past=True)
    pb = CouplingProfile(1.0, 10.0, 1.0, 2.0, 1.0)
    ref, _ = integrate.quad(lambda t: coupling_at(pb, t) * coupling_at(pa, t - 9.0), 10, 14,
                            points=[11, 13])
    assert np.isclose(cross_correlation(pb, pa, 9.0), ref, rtol=1e-10)
    with pytest.raises(ValueError, match="diverges"):
        cross_correlation(pa, pa, 0.0)


def test_correlation_knots():
    p = CouplingProfile(1.0, 0.0, 1.0, 0.0, 1.0)
    assert correlation_knots(p, p) == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_panel_quad_known_integral():
    est = panel_quad(np.sin, [0.0, 1.0, math.pi], 1e-14, 1e-12, 100)
    assert np.isclose(est.value, 2.0, rtol=1e-13)
    assert est.error <= 1e-12 * 2


def test_panel_quad_subdivision_limit():
    with pytest.raises(QuadratureError, match="subdivision limit") as e:
        panel_quad(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3) + 1e-12), [0.0, 1.0], 1e-15, 1e-15, 5)
    assert math.isfinite(e.value.value)


def test_panel_quad_empty_range():
    assert panel_quad(np.sin, [1.0, 1.0], 1e-8, 1e-8, 10) == (0.0, 0.0)


def test_retarded_frozen_values():
    for D, ref in SYM_GR.items():
        est = frak_g_retarded(SYM, SYM, D, 1.0, TIGHT)
        assert np.isclose(est.value, ref, rtol=1e-11)


def test_keldysh_frozen_values():
    for D, ref in SYM_GK_CROSS.items():
        aa, bb, ba = frak_g_keldysh(sym(D))
        assert np.isclose(ba.value, ref, rtol=1e-10)
        assert np.isclose(aa.value, SYM_GK_SELF, rtol=1e-9)
        assert aa == bb
    short = CouplingProfile(1.0, 0.0, 1.0, 2.0, 1.0)
    _, bb, _ = frak_g_keldysh(Scenario(1.0, 5.0, SYM, short, TIGHT))
    assert np.isclose(bb.value, SHORT_GK_SELF, rtol=1e-9)


@pytest.mark.parametrize("D", [1.0, 3.0, 6.5])
def test_position_route_matches_momentum_route(D):
    pa = CouplingProfile(1.0, 0.0, 2.0, 1.0, 1.5)
    pb = CouplingProfile(0.8, 1.0, 1.0, 2.0, 2.0)
    s = Scenario(0.9, D, pa, pb, TIGHT)
    _, _, ba = frak_g_keldysh(s)
    assert np.isclose(keldysh_cross_position(s), ba.value, rtol=1e-7, atol=1e-12)


def test_integrate_across_cone_both_poles():
    # the window contains both tau = -r and tau = +r
    p = CouplingProfile(1.0, 0.0, 1.0, 0.0, 1.0)
    s = Scenario(1.0, 0.7, p, p, TIGHT)
    direct = integrate_across_cone(lambda t: cross_correlation(p, p, t), -2.0, 2.0, 0.7, 1.0,
                                   correlation_knots(p, p))
    assert np.isclose(direct, frak_g_keldysh(s)[2].value, rtol=1e-7)
    with pytest.raises(ValueError):
        integrate_across_cone(lambda t: 1.0, -1.0, 1.0, 0.0, 1.0)


@pytest.mark.parametrize("m", [0.7, 1.8])
def test_infinite_past_retarded_matches_slow_switch_on(m):
    pb = CouplingProfile(1.0, 0.0, 1.0, 2.0, 1.0)
    pa = CouplingProfile.ending_at(3.0, 1.0, 0.0, 0.0, 2.0, infinite_past=True)
    slow = CouplingProfile.ending_at(3.0, 1.0, 400.0, 1200.0, 2.0)
    q = QuadSettings(abs_tol=1e-13, rel_tol=1e-10)
    exact = frak_g_retarded(pa, pb, 4.0, m, q).value
    assert np.isclose(exact, frak_g_retarded(slow, pb, 4.0, m, q).value, rtol=1e-4)


def test_spacelike_retarded_vanishes():
    g = greens_bundle(sym(12.0))
    assert g.gR_BA == 0.0 and g.gR_AB == 0.0
    assert g.gK_BA != 0.0


def test_zero_ramp_self_term_divergent():
    rect = CouplingProfile(1.0, 0.0, 0.0, 2.0, 1.0)
    s = Scenario(1.0, 3.0, rect, SYM)
    aa, bb, _ = frak_g_keldysh(s)
    assert aa is DIVERGENT
    assert bb is not DIVERGENT
    with pytest.raises(NonadiabaticDivergence):
        greens_bundle(s)


def test_zero_coupling_gives_zero_self_term():
    off = CouplingProfile(0.0, 0.0, 0.0, 2.0, 0.0)
    aa, _, _ = frak_g_keldysh(Scenario(1.0, 3.0, off, SYM))
    assert aa.value == 0.0


def test_swap_symmetry():
    pa = CouplingProfile(1.0, 0.0, 1.0, 2.0, 1.5)
    pb = CouplingProfile(0.6, 3.0, 2.0, 1.0, 1.0)
    s = Scenario(1.0, 2.0, pa, pb)
    g, h = greens_bundle(s), greens_bundle(s.swapped())
    for name in ("gR_BA", "gR_AB", "gK_AA", "gK_BB", "gK_BA"):
        assert np.isclose(getattr(h.swapped(), name), getattr(g, name), rtol=1e-6, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(shift=st.floats(-20.0, 20.0), D=st.floats(0.5, 10.0))
def test_time_shift_invariance(shift, D):
    pa = CouplingProfile(1.0, 0.0, 1.0, 2.0, 1.5)
    pb = CouplingProfile(0.6, 1.0, 2.0, 1.0, 1.0)
    g = greens_bundle(Scenario(1.0, D, pa, pb))
    h = greens_bundle(Scenario(1.0, D, pa.shifted(shift), pb.shifted(shift)))
    for name in ("gR_BA", "gR_AB", "gK_AA", "gK_BB", "gK_BA"):
        assert np.isclose(getattr(h, name), getattr(g, name), rtol=1e-5, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(D=st.floats(0.3, 15.0), tb=st.floats(-8.0, 8.0), lb=st.floats(0.1, 2.0))
def test_bundle_invariants(D, tb, lb):
    pa = CouplingProfile(1.0, 0.0, 1.0, 1.0, 2.0)
    pb = CouplingProfile(lb, tb, 1.5, 0.5, 1.0)
    g = greens_bundle(Scenario(1.0, D, pa, pb))
    assert g.invariant_violations(slack=1e-8) == []
    assert 0.0 < g.gamma_A <= 1.0 and 0.0 < g.gamma_B <= 1.0
