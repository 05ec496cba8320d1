"""Tests for the local-analysis layer: germs, residuals, Gegenbauer, Riccati."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchscheb.catalog import CASE_IDS, get_case, to_normal_form
from fuchscheb.ovals import periods
from fuchscheb.picard_fuchs import (
    analytic_coeffs,
    gegenbauer_solution,
    germ_eval,
    local_germ,
    relation_residual,
    residual_fuchsian,
    residual_hypergeometric,
    riccati_trace,
    scalar_defect,
    scalar_defect_poly,
    scalar_reduction_defect,
    unit_system,
)
from fuchscheb.rational import F, pmat_is_zero


def _case(cid):
    return get_case(cid, a=F(3)) if cid == "sym4" else get_case(cid)


def _unit(cid):
    return to_normal_form(_case(cid).system, "unit")


# ---------------------------------------------------------------------------
# exact identities


@pytest.mark.parametrize("cid", CASE_IDS)
def test_scalar_reduction_identity_exact(cid):
    # (h-h0)(h-h1)((A^-1)' + (A^-1)^2) equals the conjugated exponent matrix,
    # verified in rational arithmetic with no rounding at all
    defect = scalar_reduction_defect(_case(cid).system)
    assert pmat_is_zero(defect)


def test_analytic_coeffs_match_hypergeometric_products():
    # independent oracle: the coefficient of t^{k+1} in the analytic solution
    # is the hypergeometric term (1-lam)_k (lam)_k / ((2)_k k!)
    for lam in (F(5, 6), F(1, 2), F(3, 4), F(2, 3), F(-1, 6)):
        a = analytic_coeffs(lam, 13)
        term = F(1)
        for k in range(12):
            assert a[k] == term
            term *= (1 - lam + k) * (lam + k)
            term /= (2 + k) * (1 + k)


@given(st.integers(-40, 40).filter(lambda n: n % 7 != 0))
@settings(max_examples=25, deadline=None)
def test_analytic_coeffs_reflection_symmetry(num):
    # lam(lam-1) is invariant under lam -> 1-lam, so the whole series is;
    # this underpins the lam > 1 branch of the Riccati certificate
    lam = F(num, 7)
    assert analytic_coeffs(lam, 9) == analytic_coeffs(1 - lam, 9)


def test_scalar_defect_poly_examples():
    # lam = 2, p = t^2 - t: p'' = 2 and t(t-1)*2 = 2p, so the defect is 0
    assert scalar_defect_poly([0, -1, 1], 2) == []
    assert scalar_defect_poly([0, 1], 1) == []  # p = t solves the lam=1 case
    with pytest.raises(ValueError):
        scalar_defect_poly([], 2)
    with pytest.raises(ValueError):
        scalar_defect_poly([0, 0], 2)


# ---------------------------------------------------------------------------
# unit-form constructor and validation


def test_unit_system_constructor():
    sys = unit_system(F(5, 6), F(7, 6))
    g = local_germ(sys, 0, trunc=6)
    assert g.lam == F(5, 6) and g.mu == F(7, 6) and g.omega == 1
    # slot order is preserved even when the first exponent is the larger one
    sysm = unit_system(F(3, 2), F(1, 2), 2)
    gm = local_germ(sysm, 0, trunc=6)
    assert gm.lam == F(3, 2) and gm.mu == F(1, 2)


def test_unit_system_rejects_bad_exponents():
    with pytest.raises(ValueError):
        unit_system(F(1, 2), F(1, 2))  # repeated
    with pytest.raises(ValueError):
        unit_system(F(1, 3), F(2, 3))  # sum != 2
    with pytest.raises(ValueError):
        unit_system(F(2), F(0))  # zero exponent
    with pytest.raises(ValueError):
        unit_system(F(5, 6), F(7, 6), 0)  # omega = 0


def test_local_germ_validation():
    usys, _ = _unit("1")
    with pytest.raises(ValueError):
        local_germ(get_case("1").system, 0)  # not in unit form
    with pytest.raises(ValueError):
        local_germ(usys, 0, trunc=1)
    with pytest.raises(ValueError):
        local_germ(usys, 2)
    with pytest.raises(ValueError):
        local_germ(usys, 0, direction=-1)  # direction is an infinity knob
    with pytest.raises(ValueError):
        local_germ(usys, math.inf, direction=3)


def test_resonant_truncation_too_small():
    # exponent gap 5: the log coefficient appears at order 5, so trunc=4
    # cannot produce a correct germ and must be refused
    sys = unit_system(F(7, 2), F(-3, 2))
    with pytest.raises(ValueError):
        local_germ(sys, math.inf, trunc=4)
    g = local_germ(sys, math.inf, trunc=8)
    assert g.frames[1].log_gamma is not None


# ---------------------------------------------------------------------------
# germs at the finite singular points


def test_base0_germ_structure():
    usys, _ = _unit("1")
    g = local_germ(usys, 0, trunc=30)
    assert set(g.exponents) == {0, 1}
    assert g.base == 0 and g.trunc_order == 30
    # normalization x'(0) = 1 forces y'(0) = 1/omega
    assert g.frames[0].series[0] == (F(1), 1 / g.omega)
    # the vector recursion reproduces both scalar series exactly
    ax = analytic_coeffs(g.lam, 30)
    ay = analytic_coeffs(g.mu, 30)
    for m in range(30):
        assert g.frames[0].series[m][0] == ax[m]
        assert g.frames[0].series[m][1] == ay[m] / g.omega
    # analytic frame carries no log; the exponent-0 frame does (lam not integer)
    assert g.frames[0].log_gamma is None
    assert g.log_part is not None
    assert g.constants["gamma"] != 0
    assert 0.9 < g.radius < 1.3


def test_base0_germ_against_hyp2f1():
    mp = pytest.importorskip("mpmath")
    usys, _ = _unit("2")
    lam, mu, om = float(usys.lam), float(usys.mu), float(usys.omega)
    g = local_germ(usys, 0, trunc=40)
    for t in (0.3, -0.45, 0.25 + 0.35j, -0.2 - 0.3j):
        x, y = germ_eval(g, t)
        xo = complex(t * mp.hyp2f1(1 - lam, lam, 2, t))
        yo = complex(t * mp.hyp2f1(1 - mu, mu, 2, t)) / om
        assert abs(x - xo) <= 1e-12 * abs(xo)
        assert abs(y - yo) <= 1e-12 * abs(yo)


@pytest.mark.parametrize("cid", ["1", "3", "6"])
def test_base1_frames_satisfy_system(cid):
    usys, _ = _unit(cid)
    g = local_germ(usys, 1, trunc=40)
    assert set(g.exponents) == {0, 1}
    for t in (1 + 0.25j, 1.3 + 0.1j, 0.72):
        for cf in ((1, 0), (0, 1), (0.7, -0.3)):
            x, y, dx, dy = germ_eval(g, t, coeffs=cf, with_deriv=True)
            b = usys.amatrix_num(t)
            r = abs(x - b[0][0] * dx - b[0][1] * dy) + abs(y - b[1][0] * dx - b[1][1] * dy)
            assert r <= 1e-9 * (abs(x) + abs(y))


def test_base1_log_structure():
    usys, _ = _unit("1")
    g = local_germ(usys, 1, trunc=20)
    gamma, log_series = g.log_part
    assert gamma == g.constants["gamma"] != 0
    # the log multiplies the analytic-at-1 frame itself
    assert log_series == g.frames[0].series
    # exponent-0 frame normalized to value 1 at the base
    assert g.frames[1].series[0][0] == 1


def test_germ_eval_derivative_consistency():
    usys, _ = _unit("3")
    g = local_germ(usys, 1, trunc=30)
    t, h = 1.2 + 0.2j, 1e-6
    x, y, dx, dy = germ_eval(g, t, coeffs=(0.4, 1.0), with_deriv=True)
    xp, yp = germ_eval(g, t + h, coeffs=(0.4, 1.0))
    xm, ym = germ_eval(g, t - h, coeffs=(0.4, 1.0))
    assert abs((xp - xm) / (2 * h) - dx) <= 1e-6 * abs(dx)
    assert abs((yp - ym) / (2 * h) - dy) <= 1e-6 * abs(dy)


# ---------------------------------------------------------------------------
# germs at infinity


def test_infinity_constants_case1():
    usys, _ = _unit("1")
    g = local_germ(usys, math.inf, trunc=10)
    # alpha = lam/(2*omega*(mu-lam+1)) and beta = mu*omega/(2*(lam-mu+1))
    assert g.constants["alpha"] == F(5, 16)
    assert g.constants["beta"] == F(7, 8)
    assert set(g.exponents) == {-g.lam, -g.mu}
    assert g.frames[0].log_gamma is None and g.frames[1].log_gamma is None


def test_infinity_germ_resonant_display():
    # exponents (3/2, 1/2): x-series of the large frame starts
    # t^{3/2} - (3/4) t^{1/2} - (9/64) t^{-1/2} + ...
    sys = unit_system(F(3, 2), F(1, 2), 1)
    g = local_germ(sys, math.inf, trunc=8)
    big = g.frames[1]
    assert big.exponent == F(3, 2)
    assert [c[0] for c in big.series[:3]] == [F(1), F(-3, 4), F(-9, 64)]
    assert big.log_gamma == F(-3, 4)
    assert g.frames[0].series[1] == (F(1, 8), F(-1, 4))
    # the same data with omega = 2 scales as 1/omega where expected
    g2 = local_germ(unit_system(F(3, 2), F(1, 2), 2), math.inf, trunc=8)
    assert g2.frames[1].log_gamma == F(-3, 8)
    assert g2.frames[1].series[2] == (F(-9, 64), F(3, 16))
    assert g2.frames[0].series[1] == (F(1, 4), F(-1, 4))


def test_infinity_resonant_catalog_case6():
    usys, _ = _unit("6")
    g = local_germ(usys, math.inf, trunc=12)
    assert g.constants["gamma"] == F(-3, 4)
    assert abs(float(g.constants["gamma"])) > 1e-12
    assert "beta" not in g.constants
    gneg = local_germ(usys, math.inf, trunc=12, direction=-1)
    assert gneg.constants["gamma"] == F(3, 4)


def test_infinity_frames_satisfy_system():
    usys, _ = _unit("1")
    g = local_germ(usys, math.inf, trunc=40)
    for t in (5.0 + 2j, -7.0 + 0j, 12.0):
        for cf in ((1, 0), (0, 1), (1, 1)):
            x, y, dx, dy = germ_eval(g, t, coeffs=cf, with_deriv=True)
            b = usys.amatrix_num(t)
            r = abs(x - b[0][0] * dx - b[0][1] * dy) + abs(y - b[1][0] * dx - b[1][1] * dy)
            assert r <= 1e-10 * (abs(x) + abs(y))


def test_infinity_direction_negative_is_real_on_negative_axis():
    usys, _ = _unit("6")
    g = local_germ(usys, math.inf, trunc=40, direction=-1)
    for t in (-6.0, -30.0):
        x, y, dx, dy = germ_eval(g, t, coeffs=(1.0, 1.0), with_deriv=True)
        assert x.imag == 0 and y.imag == 0
        b = usys.amatrix_num(t)
        r = abs(x - b[0][0] * dx - b[0][1] * dy) + abs(y - b[1][0] * dx - b[1][1] * dy)
        assert r <= 1e-9 * (abs(x) + abs(y))


@pytest.mark.parametrize("cid,base,direction", [
    ("1", 0, 1), ("1", 1, 1), ("1", math.inf, 1), ("1", math.inf, -1),
    ("6", 0, 1), ("6", 1, 1), ("6", math.inf, 1), ("6", math.inf, -1),
    ("sym4", math.inf, 1),
])
def test_scalar_defect_vanishes(cid, base, direction):
    # substituting each frame into its scalar equation must cancel exactly
    # (rational arithmetic) at every order the truncation determines
    usys, _ = _unit(cid)
    g = local_germ(usys, base, trunc=12, direction=direction)
    for fi in (0, 1):
        for comp in (0, 1):
            defect = scalar_defect(g, fi, comp)
            low = {k: v for k, v in defect.items() if k <= 10}
            assert low == {}


# ---------------------------------------------------------------------------
# residuals on quadrature data


def test_residual_fuchsian_case5_window():
    r = residual_fuchsian(get_case("5"), np.linspace(0.01, 0.24, 20))
    assert r < 1e-6


def test_residual_fuchsian_case8_window():
    # weighted integrals, vector ordering (I2, I1)
    r = residual_fuchsian(get_case("8"), np.linspace(-0.95, -0.05, 20))
    assert r < 1e-6


@pytest.mark.parametrize("cid", ["2", "7"])
def test_residual_fuchsian_default_grid(cid):
    assert residual_fuchsian(_case(cid)) < 1e-6


def test_relation_residual_scale_invariance():
    case = get_case("1")
    p = periods(case, 0.07)
    r1 = relation_residual(case, p.h, p.i1, p.i2, p.di1, p.di2)
    r2 = relation_residual(case, p.h, 3 * p.i1, 3 * p.i2, 3 * p.di1, 3 * p.di2)
    assert r1 == pytest.approx(r2, rel=1e-12)
    with pytest.raises(ValueError):
        relation_residual(case, 0.07, 0.0, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("cid", ["1", "6", "8"])
def test_residual_hypergeometric_default_grid(cid):
    assert residual_hypergeometric(_case(cid)) < 1e-6


def test_residual_hypergeometric_rejects_singular_point():
    with pytest.raises(ValueError):
        residual_hypergeometric(get_case("1"), t_grid=[0.0])


def test_quadrature_matches_hyp2f1_closed_form():
    # the unit-coordinate period is proportional to t*2F1(1-lam, lam; 2; t)
    mp = pytest.importorskip("mpmath")
    case = get_case("2")
    usys, tr = to_normal_form(case.system, "unit")
    lam = float(usys.lam)
    tmat = np.array([[float(v) for v in row] for row in tr.T])
    ts = [0.12, 0.35, 0.6, 0.85]
    quad, orac = [], []
    for t in ts:
        p = periods(case, tr.h_old(t))
        quad.append((tmat @ np.array([p.i1, p.i2]))[0])
        orac.append(float(t * mp.hyp2f1(1 - lam, lam, 2, t)))
    quad, orac = np.array(quad), np.array(orac)
    c = float(quad @ orac) / float(orac @ orac)
    assert np.max(np.abs(quad - c * orac)) <= 1e-8 * np.max(np.abs(quad))


@pytest.mark.parametrize("cid,tpt", [("1", 0.1), ("4", -0.1)])
def test_germ_quadrature_consistency(cid, tpt):
    # base-0 germ vs quadrature at t = +-0.1: one-point least-squares constant,
    # then both components and a second point must agree to 1e-5
    case = _case(cid)
    usys, tr = to_normal_form(case.system, "unit")
    g = local_germ(usys, 0, trunc=40)
    tmat = np.array([[float(v) for v in row] for row in tr.T])

    p = periods(case, tr.h_old(tpt))
    quad = tmat @ np.array([p.i1, p.i2])
    gx, gy = germ_eval(g, tpt)
    germ_vec = np.array([gx.real, gy.real])
    c = float(quad @ germ_vec) / float(germ_vec @ germ_vec)
    assert np.linalg.norm(quad - c * germ_vec) <= 1e-5 * np.linalg.norm(quad)

    p2 = periods(case, tr.h_old(2 * tpt))
    quad2 = tmat @ np.array([p2.i1, p2.i2])
    gx2, gy2 = germ_eval(g, 2 * tpt)
    germ_vec2 = np.array([gx2.real, gy2.real])
    assert np.linalg.norm(quad2 - c * germ_vec2) <= 1e-5 * np.linalg.norm(quad2)


# ---------------------------------------------------------------------------
# Gegenbauer polynomials


def test_gegenbauer_examples():
    assert gegenbauer_solution(2) == [F(0), F(-1), F(1)]
    assert gegenbauer_solution(3) == [F(0), F(1, 2), F(-3, 2), F(1)]
    # lam and 1-lam give the same equation, hence the same polynomial
    assert gegenbauer_solution(-1) == gegenbauer_solution(2)
    assert len(gegenbauer_solution(-2)) - 1 == 3
    for bad in (0, 1, F(1, 2)):
        with pytest.raises(ValueError):
            gegenbauer_solution(bad)


@pytest.mark.parametrize("lam", [-2, -1, 2, 3, 4])
def test_gegenbauer_defect_and_roots(lam):
    poly = gegenbauer_solution(lam)
    assert poly[-1] == 1
    assert scalar_defect_poly(poly, lam) == []
    roots = np.roots([float(c) for c in reversed(poly)])
    assert np.max(np.abs(roots.imag)) < 1e-9
    assert np.all(roots.real > -1e-9) and np.all(roots.real < 1 + 1e-9)


@pytest.mark.parametrize("lam", [2, 3, 4, 5])
def test_gegenbauer_against_legendre(lam):
    # independent oracle: x(xi) = (1 - xi^2) P'_{lam-1}(xi) with t = (1+xi)/2
    # solves the same equation and is a polynomial of the same degree
    from numpy.polynomial import Polynomial as P
    from numpy.polynomial.legendre import Legendre

    dp = Legendre.basis(lam - 1).deriv().convert(kind=P)
    xi = P([-1, 2])  # xi = 2t - 1
    oracle = (1 - xi**2) * dp(xi)
    oc = oracle.coef / oracle.coef[-1]
    mine = np.array([float(c) for c in gegenbauer_solution(lam)])
    assert np.allclose(mine, oc, rtol=0, atol=1e-12)


def test_gegenbauer_matches_analytic_solution_exactly():
    # the analytic-at-0 series terminates for integer lam and equals the
    # polynomial after the leading-1 normalization, coefficient by coefficient
    for lam in (-2, 3, 4):
        deg = lam if lam >= 2 else 1 - lam
        a = analytic_coeffs(F(lam), deg + 3)
        assert all(c == 0 for c in a[deg:])  # terminates
        series = [F(0)] + a[:deg]
        lead = series[deg]
        assert [c / lead for c in series] == gegenbauer_solution(lam)


# ---------------------------------------------------------------------------
# Riccati certificate


def test_riccati_trace_basic():
    r = riccati_trace(F(5, 6), (-10.0, 0.0))
    assert r.ok
    assert r.inside_isocline and np.all(r.isocline < 0)
    assert r.w_sign == -1 and np.all(r.w < 0)
    assert r.x_prime_sign_constant and r.z_prime_sign_constant
    assert r.blow_up is None
    # w(0) = 0: the trajectory starts arbitrarily close to zero
    assert abs(r.w[0]) < 1e-5
    assert r.ratio_consistency < 1e-8


def test_riccati_trace_lam_above_one_branch():
    r = riccati_trace(F(7, 6), (-10.0, 0.0))
    assert r.lam_used == pytest.approx(-1 / 6)
    assert r.ok


def test_riccati_trace_long_range_nonvanishing():
    # |x| strictly positive on [-1000, 0): the sign of x is pinned
    for lam in (F(5, 6), F(1, 2), F(3, 4)):
        r = riccati_trace(lam, (-1000.0, 0.0), n=1500)
        assert r.ok and r.x_nonvanishing
        assert np.all(r.x < 0)


def test_riccati_trace_rejects_bad_input():
    with pytest.raises(ValueError):
        riccati_trace(2, (-10.0, 0.0))
    with pytest.raises(ValueError):
        riccati_trace(F(5, 6), (3.0, 0.0))


def test_riccati_x_slope_matches_germ():
    # cross-check x' from the linear subsystem against the series germ
    # inside its convergence disc
    usys, _ = _unit("1")
    g = local_germ(usys, 0, trunc=40)
    r = riccati_trace(F(5, 6), (-10.0, 0.0), n=2000)
    for tv in (-0.2, -0.5, -0.8):
        idx = int(np.argmin(np.abs(r.t - tv)))
        _, _, dx, _ = germ_eval(g, r.t[idx], with_deriv=True)
        assert r.x_prime[idx] == pytest.approx(dx.real, rel=1e-6)
