"""Exact rational checks of the catalogued systems and their normal forms."""

from fractions import Fraction

import pytest

from fuchscheb import catalog
from fuchscheb.catalog import (
    AffineTransform,
    FuchsianSystem,
    exponents,
    get_case,
    lambda_star,
    normal_form_template,
    to_normal_form,
    transform_system,
    verify_hypotheses,
)
from fuchscheb.rational import (
    F,
    mat,
    minv,
    pcompose_affine,
    pmat_from_pair,
    pmat_mul,
    ptrim,
)

ALL = catalog.all_cases()


def test_case_ids():
    assert catalog.case_ids() == ("1", "2", "3", "4", "5", "6", "7", "8", "sym4")


@pytest.mark.parametrize("case", ALL, ids=lambda c: c.id)
def test_hypotheses_hold_exactly(case):
    rep = verify_hypotheses(case.system)
    assert rep.slope_eigenvalues_real_distinct
    assert rep.det_roots_real_distinct
    assert rep.trace_matches_det_derivative
    assert rep.declared_critical_values_match
    assert rep.holds


@pytest.mark.parametrize("case", ALL, ids=lambda c: c.id)
def test_exponent_convention(case):
    lam, mu, _ = exponents(case.system)
    assert lam + mu == 2
    assert F(1, 2) <= lam < mu <= F(3, 2)
    assert lam == case.system.lam and mu == case.system.mu


def test_exponent_values():
    assert exponents(get_case(1).system) == (F(5, 6), F(7, 6), F(5, 6))
    assert exponents(get_case(6).system) == (F(1, 2), F(3, 2), F(1, 2))
    assert lambda_star(2) == 2
    assert lambda_star(F(3, 4)) == lambda_star(F(5, 4)) == F(3, 4)


def test_degenerate_slope_matrix_reported_not_thrown():
    # A(h) = h * Id has a repeated slope eigenvalue: first hypothesis fails
    sys = FuchsianSystem(
        a0=mat(0, 0, 0, 0), a1=mat(1, 0, 0, 1),
        h0=F(0), h1=F(1), lam=F(1), mu=F(1), omega=F(1), cut_sign=1,
    )
    rep = verify_hypotheses(sys)
    assert not rep.slope_eigenvalues_real_distinct
    assert not rep.holds


def test_case1_matrix_entries():
    s = get_case(1).system
    # A(h) = [[6h/5, -4/15], [4h/35, 6h/7 - 16/105]]
    assert s.a0 == mat(0, F(-4, 15), 0, F(-16, 105))
    assert s.a1 == mat(F(6, 5), 0, F(4, 35), F(6, 7))
    assert s.trace_poly() == [F(-16, 105), F(72, 35)]
    assert s.det_poly() == [F(0), F(-16, 105), F(36, 35)]


def test_case6_det_roots():
    s = get_case(6).system
    assert s.det_poly() == [F(0), F(4, 3), F(4, 3)]
    assert set(verify_hypotheses(s).det_roots) == {F(0), F(-1)}


def test_case8_data():
    c = get_case(8)
    assert c.h_string() == "x^-2 + x^-3*y^2 - 2*x^-1"
    assert c.m_xpow == -4
    assert c.sigma == (F(-1), F(0))
    assert c.system.h0 == -1 and c.system.h1 == 0
    assert (c.form1.xpow, c.form2.xpow) == (-3, -4)


def test_sym4_matrix_and_errors():
    c = get_case("sym4", a=3)
    s = c.system
    # (1,1) entry (4h-1)/3 and (2,2) entry 4h/5 + (a-14)/(15(a+2))
    assert (s.a0[0][0], s.a1[0][0]) == (F(-1, 3), F(4, 3))
    assert (s.a0[1][1], s.a1[1][1]) == (F(-11, 75), F(4, 5))
    assert (s.h0, s.h1) == (F(1, 4), F(1, 5))
    assert c.sigma == (F(1, 5), F(1, 4))
    with pytest.raises(ValueError):
        get_case("sym4")
    with pytest.raises(ValueError):
        get_case("sym4", a=2)
    with pytest.raises(ValueError):
        get_case("nope")


@pytest.mark.parametrize("case", ALL, ids=lambda c: c.id)
def test_sigma_endpoints_and_cut(case):
    s = case.system
    lo, hi = case.sigma
    if hi is None:
        # unbounded interval: the second critical value sits on the other side
        assert lo == s.h0 == 0 and s.h1 < 0 and s.cut_sign == -1
    else:
        assert {lo, hi} == {s.h0, s.h1}
    # the cut [h1, +-oo) never contains h0
    assert s.cut_sign == (1 if s.h1 > s.h0 else -1)


@pytest.mark.parametrize("case", ALL, ids=lambda c: c.id)
def test_table_rows_are_sheared_normal_forms(case):
    # each stored family equals the sheared template written around one of
    # its critical values, with the catalogued omega
    s = case.system
    got = pmat_from_pair(s.a0, s.a1)
    hits = []
    for origin, slot in ((s.h0, s.h1 - s.h0), (s.h1, s.h0 - s.h1)):
        t = normal_form_template("sheared", s.lam, s.mu, s.omega, slot=slot)
        shifted = tuple(
            tuple(pcompose_affine(t[i][j], 1, -origin) for j in range(2))
            for i in range(2)
        )
        if shifted == got:
            hits.append(origin)
    expected_origin = s.h1 if case.id == "8" else s.h0
    assert hits == [expected_origin]


@pytest.mark.parametrize("case", ALL, ids=lambda c: c.id)
@pytest.mark.parametrize("form", catalog.NORMAL_FORMS)
def test_normal_form_matches_template_and_round_trips(case, form):
    s = case.system
    out, tr = to_normal_form(s, form, omega=s.omega)
    slot = F(1) if form == "unit" else s.h1 - s.h0
    assert out.pmatrix() == normal_form_template(form, s.lam, s.mu, s.omega, slot)
    assert (out.h0, out.h1) == ((F(0), F(1)) if form == "unit" else (F(0), s.h1 - s.h0))
    back = transform_system(out, tr.inverse())
    assert back.a0 == s.a0 and back.a1 == s.a1
    assert (back.h0, back.h1) == (s.h0, s.h1)


def test_unit_form_entry_example():
    out, _ = to_normal_form(get_case(1).system, "unit")
    # entry (1,1) is (2t - 1)/(2 lam) with lam = 5/6
    assert out.pmatrix()[0][0] == [F(-3, 5), F(6, 5)]
    assert out.cut_sign == 1


def test_diagonal_form_is_fixed_point():
    base, _ = to_normal_form(get_case(2).system, "diagonal", omega=1)
    again, tr = to_normal_form(base, "diagonal", omega=1)
    assert again == base
    assert tr == catalog.IDENTITY_TRANSFORM


def test_shear_template_identity():
    # sheared = V diagonal V^-1 with V = [[1,0],[-1/omega,1]], same omega
    for lam, omega, slot in ((F(5, 6), F(-3), F(4, 27)), (F(3, 4), F(7, 2), F(-2))):
        mu = 2 - lam
        V = pmat_from_pair(mat(1, 0, -1 / omega, 1), mat(0, 0, 0, 0))
        Vi = pmat_from_pair(mat(1, 0, 1 / omega, 1), mat(0, 0, 0, 0))
        diag = normal_form_template("diagonal", lam, mu, omega, slot)
        assert pmat_mul(pmat_mul(V, diag), Vi) == normal_form_template(
            "sheared", lam, mu, omega, slot
        )


def test_decoupled_system_rejected():
    sys = FuchsianSystem(
        a0=mat(F(-1, 2), 0, 0, F(-1, 2)),  # diagonal a0: no off-diagonal scale
        a1=mat(2, 0, 0, F(2, 3)),
        h0=F(0), h1=F(1), lam=F(1, 2), mu=F(3, 2), omega=F(1), cut_sign=1,
    )
    with pytest.raises(ValueError):
        to_normal_form(sys, "diagonal")


def test_transform_helpers():
    tr = AffineTransform(mat(2, 1, 0, 1), F(3), F(-1))
    assert tr.h_old(F(1)) == 2 and tr.h_new(F(2)) == 1
    assert tr.h_old(tr.h_new(F(7, 5))) == F(7, 5)
    inv = tr.inverse()
    # the inverse transform's coordinate map is the forward h_new
    assert inv.h_old(F(2)) == tr.h_new(F(2))
    assert minv(tr.T) == inv.T


def test_catalog_json_round_trip_bytes():
    shipped = catalog.DATA_PATH.read_text(encoding="utf-8")
    cases = catalog.load_catalog()
    regen = catalog.dump_catalog([cases[c] for c in catalog.CASE_IDS])
    assert regen == shipped
    for cid in catalog.CASE_IDS:
        built = get_case(cid, a=3) if cid == "sym4" else get_case(cid)
        assert cases[cid] == built


def test_center_value_is_h0():
    for case in ALL:
        x, y = case.center
        assert abs(catalog.h_eval(case, x, y) - float(case.system.h0)) < 1e-12


def test_h_gradient_vanishes_at_center():
    for case in ALL:
        gx, gy = catalog.h_grad(case, case.center[0] or 0.0, case.center[1] or 0.0)
        assert abs(gx) < 1e-12 and abs(gy) < 1e-12


def test_oneform_strings():
    assert str(get_case(1).form1) == "y dx"
    assert str(get_case(3).form2) == "x^2*y dx"
    assert str(get_case(8).form2) == "x^-4*y dx"
    assert str(get_case("sym4", a=3).form1) == "x^2 dy"
    for s in ("y dx", "x*y dx", "x^-4*y dx", "x^2*y^2 dy"):
        assert str(catalog.oneform_from_str(s)) == s


def test_hamiltonian_strings():
    assert get_case(1).h_string() == "y^2 + x^2 - x^3"
    assert get_case(3).h_string() == "1/2*y^2 + 1/2*x^2 + x*y^2 - 1/3*x^3"
    assert get_case("sym4", a=3).h_string() == "y^2 + x^2 - y^4 - 3*x^2*y^2 - x^4"


def test_amatrix_and_det_consistency():
    s = get_case(5).system
    h = F(1, 7)
    A = s.amatrix(h)
    det = s.det_poly()
    val = det[0] + det[1] * h + det[2] * h * h
    assert A[0][0] * A[1][1] - A[0][1] * A[1][0] == val
    # determinant vanishes exactly at both critical values
    for r in (s.h0, s.h1):
        Ar = s.amatrix(r)
        assert Ar[0][0] * Ar[1][1] - Ar[0][1] * Ar[1][0] == 0
