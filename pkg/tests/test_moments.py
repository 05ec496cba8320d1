"""Tests for moment recurrences, reductions onto the period pair, and spans."""

import csv
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchscheb.catalog import CASE_IDS, get_case
from fuchscheb.moments import (
    MomentTable,
    QUARTIC_NU,
    _area_triple8,
    _case8_triple,
    _normalized_rank,
    case8_line_values,
    case8_pair,
    dim_check,
    fit_reduction,
    is_zero_moment,
    moment_table,
    quartic_pair,
    recurrence_case8,
    recurrence_quartic,
    reduce,
    reduction_degree_scan,
    reduction_record,
    spanning_monomials,
    write_reductions_json,
    write_residuals_csv,
)
from fuchscheb.ovals import (
    QUAD_TOL,
    area_moment,
    cached_oval,
    gelfand_leray_derivative,
    periods,
    sigma_grid,
)
from fuchscheb.rational import F, peval
from fuchscheb.vspace import application_space


def _case(cid):
    return get_case(cid, a=F(3)) if cid == "sym4" else get_case(cid)


def _pair_value(pair, h, p1, p2, pref=0):
    return h**pref * (peval(list(pair[0]), h) * p1 + peval(list(pair[1]), h) * p2)


# ---------------------------------------------------------------------------
# parity bookkeeping and tables


def test_zero_moment_parities():
    # cubic cases keep only the y-symmetry; the even quartics keep both
    c2, c4 = get_case("2"), get_case("4")
    assert is_zero_moment(c2, 0, 1)
    assert is_zero_moment(c2, 2, 3)
    assert not is_zero_moment(c2, 1, 0)
    assert is_zero_moment(c4, 1, 0)
    assert is_zero_moment(c4, 0, 1)
    assert not is_zero_moment(c4, 2, 2)
    # the symmetric quartic family is centred off the y-axis
    assert not is_zero_moment(_case("sym4"), 1, 0)
    assert is_zero_moment(_case("sym4"), 1, 1)


def test_moment_table_lookup_and_errors():
    table = MomentTable("6", 1.0, 2, {(2, 0): 5.0}, nu=1)
    assert table.value(2, 0) == 5.0
    assert table.value(0, 2) == 5.0  # symmetric fallback
    with pytest.raises(ValueError):
        table.value(4, 4)
    plain = MomentTable("1", 0.1, 2, {(2, 0): 5.0})
    with pytest.raises(ValueError):
        plain.value(0, 2)  # no symmetry outside the quartics


def test_moment_table_build_invariants():
    case = get_case("6")
    table = moment_table(case, 2.0, 6)
    assert table.nu == 1 and table.cap == 6
    assert len(table.entries) == 28  # all i + j <= 6
    assert 0 < table.est_error < 1e-8
    scale = max(abs(v) for v in table.entries.values())
    assert abs(table.value(1, 2)) < 1e-9 * scale
    assert table.value(0, 0) > 0


# ---------------------------------------------------------------------------
# exact quartic cofactor pairs


def test_quartic_pair_bases_and_symmetry():
    assert quartic_pair(0, 0, 1) == ((F(1),), ())
    assert quartic_pair(2, 0, -1) == ((), (F(1),))
    assert quartic_pair(0, 2, 1) == quartic_pair(2, 0, 1)
    with pytest.raises(ValueError):
        quartic_pair(1, 2, 1)
    with pytest.raises(ValueError):
        quartic_pair(2, 2, 0)


@pytest.mark.parametrize("nu", [1, -1])
def test_quartic_pair_first_displays(nu):
    # the two classical reductions: I_22 and I_40 against (I_00, I_20)
    assert quartic_pair(2, 2, nu) == ((F(0), F(nu, 3)), (F(-4 * nu, 3),))
    assert quartic_pair(4, 0, nu) == (
        (F(0), F(nu, 5)),
        (F(-4 * nu, 5), F(2, 5)),
    )


@pytest.mark.parametrize("nu", [1, -1])
def test_quartic_pair_leading_structure(nu):
    # single-index column: both cofactors of degree k - 1, top ratio 2 nu;
    # diagonal: the first cofactor gains one degree over the second
    for k in range(2, 7):
        a, b = quartic_pair(2 * k, 0, nu)
        assert len(a) - 1 == k - 1 and len(b) - 1 == k - 1
        assert F(b[-1]) / F(a[-1]) == 2 * nu
        a, b = quartic_pair(2 * k, 2 * k, nu)
        assert len(a) - 1 == k and len(b) - 1 == k - 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5))
def test_quartic_pair_predicts_quadrature(i2, j2):
    i, j = 2 * i2, 2 * j2
    if i + j > 10:
        i, j = i % 6, j % 6
    case = get_case("6")
    table = moment_table(case, 2.0, 12)
    got = table.value(i, j)
    model = _pair_value(quartic_pair(i, j, 1), 2.0,
                        table.value(0, 0), table.value(2, 0))
    assert abs(model - got) <= 1e-8 * max(abs(model), abs(got))


# ---------------------------------------------------------------------------
# recurrences on quadrature data


@pytest.mark.parametrize("cid,levels", [("6", (0.8, 3.0)), ("7", (0.3, 0.8))])
def test_quartic_recurrences_on_quadrature(cid, levels):
    case = get_case(cid)
    anchors = [(0, 0), (2, 0), (0, 2), (2, 2), (0, 4), (2, 4)]
    for h in levels:
        table = moment_table(case, h, 10)
        for i, j in anchors:
            for ch in recurrence_quartic(table, i, j):
                assert ch.residual < 1e-8, (cid, h, ch)


def test_quartic_recurrence_validation():
    table = moment_table(get_case("6"), 1.5, 6)
    with pytest.raises(ValueError):
        recurrence_quartic(table, 1, 2)
    with pytest.raises(ValueError):
        recurrence_quartic(table, 0, 0, nu=-1)  # disagrees with the table
    with pytest.raises(ValueError):
        recurrence_quartic(table, 4, 0)  # diagonal target beyond the cap
    plain = moment_table(get_case("1"), 0.1, 4)
    with pytest.raises(ValueError):
        recurrence_quartic(plain, 0, 0)  # nu is required


def test_case8_chain_area_and_boundary_links():
    case = get_case("8")
    values = case8_line_values(-0.5, 8)
    table = moment_table(case, -0.5, 6, kmin=-1)
    checks = recurrence_case8(values, -0.5, table=table)
    names = {ch.name for ch in checks}
    assert names == {"chain", "area", "boundary"}
    for ch in checks:
        assert ch.residual < 1e-8, ch
    # chain solved for every admissible top index
    assert {ch.target for ch in checks if ch.name == "chain"} == \
        {(k,) for k in range(2, 9)}
    with pytest.raises(ValueError):
        recurrence_case8(values, 0.5)


# ---------------------------------------------------------------------------
# the exact weighted-cubic chain


def test_case8_triples_frozen():
    assert _case8_triple(3) == ((F(-5),), (F(4),), 1)
    assert _case8_triple(4) == ((), (F(-1),), 1)
    assert _case8_triple(5) == ((F(1),), (), 2)
    assert _case8_triple(6) == ((F(-8, 7),), (F(0), F(-1, 7)), 3)
    assert case8_pair(5) == ((), (F(-1),), -2)
    # prefactor pattern: flat through k = 2, then one step per two indices
    assert [_case8_triple(k)[2] for k in range(13)] == \
        [0, 0, 0, 1, 1, 2, 3, 4, 5, 6, 7, 8, 9]
    with pytest.raises(ValueError):
        _case8_triple(-1)


@pytest.mark.parametrize("h", [-0.7, -0.25])
def test_case8_chain_matches_quadrature(h):
    case = get_case("8")
    values = case8_line_values(h, 8)
    p = periods(case, h)
    for k in range(9):
        alpha, beta, pref = case8_pair(k)
        model = _pair_value((alpha, beta), h, p.i1, p.i2, pref)
        assert abs(model - values[k]) <= 1e-9 * max(abs(model), abs(values[k]))


def test_case8_area_triples_match_quadrature():
    case = get_case("8")
    h = -0.35
    table = moment_table(case, h, 6, kmin=-1)
    p = periods(case, h)
    for (k, l), got in sorted(table.entries.items()):
        if l % 2:
            continue
        alpha, beta, pref = _area_triple8(k, l)
        model = _pair_value((alpha, beta), h, p.i1, p.i2, pref)
        assert abs(model - got) <= 1e-9 * max(abs(model), abs(got)), (k, l)
    with pytest.raises(ValueError):
        _area_triple8(-2, 0)
    with pytest.raises(ValueError):
        _area_triple8(0, 3)


# ---------------------------------------------------------------------------
# reductions


@pytest.mark.parametrize("cid", ["6", "7"])
def test_reduce_single_column_moment(cid):
    nu = QUARTIC_NU[cid]
    red = reduce(get_case(cid), 5, {(4, 0): 1})
    assert red.alpha == (F(0), F(nu, 5))
    assert red.beta == (F(-4 * nu, 5), F(2, 5))
    assert red.prefactor == 0
    assert red.residual < 1e-6


def test_reduce_quartic_generic_degrees():
    case = get_case("6")
    ap = application_space(case, 7)
    red = reduce(case, 7, {(4, 2): 2, (0, 2): -1, (6, 0): 1})
    assert all(isinstance(v, Fraction) for v in red.alpha + red.beta)
    assert len(red.alpha) - 1 == ap.deg_alpha
    assert len(red.beta) - 1 == ap.deg_beta
    assert red.residual < 1e-6


def test_reduce_case8_low_degree():
    case = get_case("8")
    red = reduce(case, 2, [1, 2, 1])
    assert red.alpha == (F(-1), F(-1, 7))
    assert red.beta == (F(-22, 7),)
    assert red.prefactor == 0
    assert red.residual < 1e-6


def test_reduce_case8_prefactor_and_degrees():
    case = get_case("8")
    ap = application_space(case, 6)
    red = reduce(case, 6, [1] * 7)
    assert (len(red.alpha) - 1, len(red.beta) - 1) == (ap.deg_alpha, ap.deg_beta)
    assert red.prefactor == ap.prefactor_power == -3
    assert red.residual < 1e-6


def test_reduce_zero_and_validation():
    case8 = get_case("8")
    red = reduce(case8, 3, [0, 0, 0, 0])
    assert red.alpha == () and red.beta == () and red.residual == 0.0
    with pytest.raises(ValueError):
        reduce(case8, 3, [1, 2])  # needs n + 1 coefficients
    with pytest.raises(ValueError):
        reduce(case8, -1, [])
    with pytest.raises(ValueError):
        reduce(get_case("1"), 0, {})
    with pytest.raises(ValueError):
        reduce(get_case("2"), 3, {(2, 1): 1})  # beyond degree n - 1
    with pytest.raises(ValueError):
        reduce(_case("sym4"), 6, {(2, 0): 1})  # even x-power inadmissible


def test_reduce_fit_cases():
    case1 = get_case("1")
    red = reduce(case1, 4, {(1, 2): 1, (3, 0): 1})
    assert (len(red.alpha) - 1, len(red.beta) - 1) == (1, 1)
    assert red.residual < 1e-6
    assert red.cond is not None and red.cond < 1e6

    s4 = _case("sym4")
    ap = application_space(s4, 6)
    red = reduce(s4, 6, {(1, 0): 1, (3, 2): -2, (5, 0): 1})
    assert (len(red.alpha) - 1, len(red.beta) - 1) == (ap.deg_alpha, ap.deg_beta)
    assert red.residual < 1e-6


# combinations whose fits collapse only at the tabulated degrees: generic
# inputs can carry small top coefficients, these were picked to keep every
# shortened fit stuck near unit residual
PLATEAU_COMBOS = {
    "1": {(1, 2): 1, (3, 0): 1},
    "2": {(1, 2): 1, (3, 0): 1},
    "3": {(1, 0): 1, (1, 2): 1},
    "4": {(0, 2): 1, (2, 0): 1},
    "5": {(0, 2): 1, (2, 0): 1},
}


@pytest.mark.parametrize("cid", sorted(PLATEAU_COMBOS))
def test_degree_scan_plateaus(cid):
    case = get_case(cid)
    ap = application_space(case, 4)
    scan = reduction_degree_scan(case, 4, PLATEAU_COMBOS[cid])
    stated = (ap.deg_alpha, ap.deg_beta)
    assert scan[stated] < 1e-6
    for degs, res in scan.items():
        if degs != stated:
            assert res > 1e-2, (degs, res)


def test_fit_reduction_rejects_unresolvable_degrees():
    with pytest.raises(ValueError, match="ill-conditioned"):
        fit_reduction(get_case("1"), 2, {(0, 0): 1}, deg_alpha=8, deg_beta=8)


# ---------------------------------------------------------------------------
# span dimensions


def test_spanning_monomials_shapes():
    assert len(spanning_monomials(get_case("2"), 5)) == 9
    mons8 = spanning_monomials(get_case("8"), 3)
    assert (-1, 0) in mons8 and (-1, 2) in mons8
    assert all(k >= -1 and l % 2 == 0 and k + l <= 2 for k, l in mons8)
    assert all(i % 2 == 1 for i, _ in spanning_monomials(_case("sym4"), 8))
    assert all(i % 2 == 0 and j % 2 == 0
               for i, j in spanning_monomials(get_case("4"), 7))


def test_dim_check_examples():
    assert dim_check(get_case("6"), 9) == 7
    assert dim_check(get_case("7"), 9) == 7
    assert dim_check(get_case("8"), 3) == 4
    assert dim_check(get_case("1"), 4) == 4
    assert dim_check(_case("sym4"), 9) == 4
    with pytest.raises(ValueError):
        dim_check(get_case("1"), 0)
    with pytest.raises(ValueError):
        dim_check(get_case("8"), -1)


@pytest.mark.parametrize("cid", CASE_IDS)
def test_dim_check_matches_dimension_formula(cid):
    case = _case(cid)
    lo = 0 if cid == "8" else (2 if cid == "sym4" else 1)
    for n in range(lo, 11):
        assert dim_check(case, n) == application_space(case, n).dim, n


@pytest.mark.parametrize("cid,ns", [("6", (2, 4, 6)), ("7", (3, 5, 7)),
                                    ("8", (0, 2, 4, 6))])
def test_dim_check_numeric_route_agrees_with_exact(cid, ns):
    # the SVD rank of the quadrature evaluation matrix reproduces the exact
    # rational rank wherever the float spectrum resolves
    case = get_case(cid)
    for n in ns:
        mons = spanning_monomials(case, n)
        grid = sigma_grid(case, max(8, 3 * len(mons)),
                          margin_h0=0.02, margin_h1=0.02)
        rows = []
        for h in grid:
            oval = cached_oval(case, float(h), QUAD_TOL)
            rows.append([area_moment(case, float(h), i, j, oval=oval).value
                         for i, j in mons])
            rows.append([gelfand_leray_derivative(case, float(h), (i, j), oval=oval)
                         for i, j in mons])
        m = np.array(rows)
        m = m / np.linalg.norm(m, axis=1, keepdims=True)
        assert _normalized_rank(m, 1e-8) == dim_check(case, n), n


# ---------------------------------------------------------------------------
# reporting


def test_writers_roundtrip(tmp_path):
    case = get_case("8")
    checks = recurrence_case8(case8_line_values(-0.5, 6), -0.5)
    path = tmp_path / "residuals.csv"
    write_residuals_csv(path, checks)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["relation", "target", "predicted", "actual", "residual"]
    assert len(rows) == len(checks) + 1
    assert float(rows[1][4]) == checks[0].residual

    red = reduce(case, 2, [1, 2, 1])
    jpath = tmp_path / "reductions.json"
    write_reductions_json(jpath, [red])
    with open(jpath) as f:
        data = json.load(f)
    assert data == [reduction_record(red)]
    assert data[0]["alpha"] == pytest.approx([-1.0, -1 / 7], rel=1e-14)
    assert data[0]["prefactor"] == 0
