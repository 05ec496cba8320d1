"""Area-moment recurrences and reductions onto the catalogued period pair.

For the symmetric quartic Hamiltonians the moments of x^i y^j over the
region bounded by an oval satisfy three-term recurrences coming from
Green's formula, and every admissible combination collapses exactly to a
polynomial pair (alpha, beta) against the two catalogued periods.  The
weighted cubic has an analogous chain for its boundary integrals which
introduces inverse powers of h.  For the remaining cases the reduction is
found by least squares against quadrature, validating the tabulated
cofactor degrees numerically.

A sign convention worth spelling out once: the positively oriented
boundary integral of y dx equals minus the enclosed area, and the
catalogued periods are normalised positive.  Hence for the quartic cases
the period pair literally equals the moment pair (I_00, I_20), and for
the weighted cubic it equals (I_10, I_00) of the weighted moments.
"""

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .catalog import CASE_IDS, HamiltonianCase, OneForm, get_case
from .ovals import (QUAD_TOL, area_moment, cached_oval, gelfand_leray_derivative,
                    line_integral, periods, sigma_grid)
from .rational import F, padd, peval, pscale, ptrim
from .vspace import _fraction_rank, application_space

QUARTIC_NU = {"6": 1, "7": -1}


# ---------------------------------------------------------------------------
# moment tables


@dataclass(frozen=True)
class MomentTable:
    """Quadrature values of the region moments at one level h.

    Entries map (i, j) to the integral of x^i y^j over the bounded region
    (weighted by the integrating factor for the weighted cubic).  Lookup is
    symmetric in (i, j) for the quartic cases.
    """

    case_id: str
    h: float
    cap: int
    entries: dict
    nu: int | None = None
    est_error: float = 0.0

    def value(self, i: int, j: int) -> float:
        key = (i, j)
        if key not in self.entries and self.nu is not None:
            key = (j, i)
        if key not in self.entries:
            raise ValueError(f"moment ({i},{j}) missing from table (cap {self.cap})")
        return self.entries[key]


def _parities(case: HamiltonianCase) -> tuple[bool, bool]:
    """(x-symmetric, y-symmetric) for the region bounded by the ovals."""
    x_sym = case.center[0] == 0 and all(i % 2 == 0 for i, _ in case.h_terms)
    y_sym = case.center[1] == 0 and all(j % 2 == 0 for _, j in case.h_terms)
    return x_sym, y_sym


def is_zero_moment(case: HamiltonianCase, i: int, j: int) -> bool:
    """True when the (i, j) moment vanishes identically by symmetry."""
    x_sym, y_sym = _parities(case)
    return (x_sym and i % 2 == 1) or (y_sym and j % 2 == 1)


def moment_table(case: HamiltonianCase, h: float, cap: int, kmin: int = 0,
                 tol: float = QUAD_TOL, check: bool = True) -> MomentTable:
    """All moments with kmin <= i and i + j <= cap at one level.

    The weighted cubic needs kmin = -1 (the perturbation brings in one
    extra inverse power of x).  With check=True the symmetry invariants
    are asserted: odd-index vanishing, and entry symmetry for the quartic
    cases, both to 1e-9 of the largest entry.
    """
    oval = cached_oval(case, h, tol)
    entries, err = {}, 0.0
    for i in range(kmin, cap + 1):
        for j in range(0, cap - max(i, 0) + 1):
            m = area_moment(case, h, i, j, tol=tol, oval=oval)
            entries[(i, j)] = m.value
            err = max(err, m.est_error)
    nu = QUARTIC_NU.get(case.id)
    table = MomentTable(case_id=case.id, h=float(h), cap=cap, entries=entries,
                        nu=nu, est_error=err)
    if check:
        scale = max(abs(v) for v in entries.values())
        for (i, j), v in entries.items():
            if is_zero_moment(case, i, j):
                assert abs(v) <= 1e-9 * scale, (i, j, v)
            if nu is not None and (j, i) in entries:
                assert abs(v - entries[(j, i)]) <= 1e-9 * scale, (i, j)
    return table


# ---------------------------------------------------------------------------
# exact reduction pairs for the symmetric quartics


def _hshift(p):
    return [F(0)] + list(p) if p else []


@lru_cache(maxsize=None)
def quartic_pair(i: int, j: int, nu: int):
    """Exact cofactors of the (i, j) moment against (I_00, I_20).

    Returns Fraction polynomials (alpha, beta) in h with
    I_ij = alpha(h) I_00 + beta(h) I_20, valid for even indices; these are
    exactly the catalogued periods of cases 6 and 7.
    """
    if nu not in (1, -1):
        raise ValueError("nu must be +1 or -1")
    if i < 0 or j < 0 or i % 2 or j % 2:
        raise ValueError("moment indices must be even and nonnegative")
    i, j = max(i, j), min(i, j)
    if (i, j) == (0, 0):
        return (F(1),), ()
    if (i, j) == (2, 0):
        return (), (F(1),)
    if j == 0:
        # nu(i+1) I_{i,0} = [nu(i-2)h - 1] I_{i-2,0} - 3 I_{i-4,2} + h I_{i-4,0}
        a1, b1 = quartic_pair(i - 2, 0, nu)
        a2, b2 = quartic_pair(i - 4, 2, nu)
        a3, b3 = quartic_pair(i - 4, 0, nu)
        alpha = padd(padd(pscale(_hshift(a1), F(nu * (i - 2))), pscale(a1, F(-1))),
                     padd(pscale(a2, F(-3)), _hshift(a3)))
        beta = padd(padd(pscale(_hshift(b1), F(nu * (i - 2))), pscale(b1, F(-1))),
                    padd(pscale(b2, F(-3)), _hshift(b3)))
        c = F(nu, i + 1)
    elif i == j:
        # nu(i+1) I_{ii} = -2i I_{i,i-2} + (i-1) h I_{i-2,i-2}
        a1, b1 = quartic_pair(i, i - 2, nu)
        a2, b2 = quartic_pair(i - 2, i - 2, nu)
        alpha = padd(pscale(a1, F(-2 * i)), pscale(_hshift(a2), F(i - 1)))
        beta = padd(pscale(b1, F(-2 * i)), pscale(_hshift(b2), F(i - 1)))
        c = F(nu, i + 1)
    else:
        # nu(i-j) I_{ij} = (j-1) I_{i,j-2} - (i-1) I_{i-2,j}
        a1, b1 = quartic_pair(i, j - 2, nu)
        a2, b2 = quartic_pair(i - 2, j, nu)
        alpha = padd(pscale(a1, F(j - 1)), pscale(a2, F(1 - i)))
        beta = padd(pscale(b1, F(j - 1)), pscale(b2, F(1 - i)))
        c = F(nu, i - j)
    return tuple(pscale(alpha, c)), tuple(pscale(beta, c))


# ---------------------------------------------------------------------------
# recurrence checks on quadrature data


@dataclass(frozen=True)
class RelationCheck:
    """One recurrence instance: predicted vs measured value of a target."""

    name: str
    target: tuple
    predicted: float
    actual: float
    residual: float


def _check(name, target, predicted, actual) -> RelationCheck:
    predicted, actual = float(predicted), float(actual)
    scale = max(abs(predicted), abs(actual))
    res = abs(predicted - actual) / scale if scale else 0.0
    return RelationCheck(name, target, predicted, actual, res)


def recurrence_quartic(table: MomentTable, i: int, j: int,
                       nu: int | None = None) -> list[RelationCheck]:
    """Evaluate the three quartic moment relations anchored at (i, j).

    The first relation predicts I_{i+2,j+2} from the cross pair (needs
    i != j); the second predicts the diagonal I_{i+2,i+2}; the third walks
    the single-index column I_{i+4,0}.  Residuals are relative to the
    larger of prediction and measurement.
    """
    if table.nu is None and nu is None:
        raise ValueError("nu is required for a table without one")
    if nu is None:
        nu = table.nu
    elif table.nu is not None and nu != table.nu:
        raise ValueError(f"table was built with nu={table.nu}, got nu={nu}")
    if i < 0 or j < 0 or i % 2 or j % 2:
        raise ValueError("moment indices must be even and nonnegative")
    h, v = table.h, table.value
    checks = []
    if i != j:
        pred = nu * ((j + 1) * v(i + 2, j) - (i + 1) * v(i, j + 2)) / (i - j)
        checks.append(_check("cross", (i + 2, j + 2), pred, v(i + 2, j + 2)))
    pred = nu * (-(2 * i + 4) * v(i + 2, i) + (i + 1) * h * v(i, i)) / (i + 3)
    checks.append(_check("diagonal", (i + 2, i + 2), pred, v(i + 2, i + 2)))
    pred = nu * ((nu * (i + 2) * h - 1) * v(i + 2, 0) - 3 * v(i, 2)
                 + h * v(i, 0)) / (i + 5)
    checks.append(_check("column", (i + 4, 0), pred, v(i + 4, 0)))
    return checks


def case8_line_values(h: float, kmax: int, tol: float = QUAD_TOL) -> np.ndarray:
    """Boundary integrals of x^(k-5) y dx, k = 0..kmax, positively oriented.

    Index k = 1, 2 gives minus the catalogued periods (i2, i1); the whole
    sequence satisfies the three-term chain checked by recurrence_case8.
    """
    case = get_case("8")
    oval = cached_oval(case, h, tol)
    return np.array([line_integral(oval, OneForm(k - 5, 1, "x"))
                     for k in range(kmax + 1)])


def recurrence_case8(values: Sequence[float], h: float,
                     table: MomentTable | None = None) -> list[RelationCheck]:
    """Check the weighted-cubic chain (and, with a table, the area links).

    values[k] is the boundary integral of x^(k-5) y dx; the chain
    (k - 1/2) h I_{k+2} = (4 - 2k) I_{k+1} + (k - 7/2) I_k is solved for
    its highest index.  A moment table (built with kmin = -1) adds the
    area relation I_{k,l+2} = (2l+2)(I_{k+2,l} - I_{k+1,l})/(2k+3l+3) and
    the boundary-area link I_{k,0} = -values[k+1].
    """
    if not -1 < h < 0:
        raise ValueError("level must lie in the interval (-1, 0)")
    checks = []
    for k in range(len(values) - 2):
        pred = ((4 - 2 * k) * values[k + 1] + (k - 3.5) * values[k]) / ((k - 0.5) * h)
        checks.append(_check("chain", (k + 2,), pred, values[k + 2]))
    if table is not None:
        kmin = min(k for k, _ in table.entries)
        for (k, l) in sorted(table.entries):
            if l % 2 or (k + 2, l) not in table.entries or (k, l + 2) not in table.entries:
                continue
            pred = (2 * l + 2) * (table.value(k + 2, l) - table.value(k + 1, l)) \
                / (2 * k + 3 * l + 3)
            checks.append(_check("area", (k, l + 2), pred, table.value(k, l + 2)))
        for k in range(max(kmin, 0), min(table.cap, len(values) - 2) + 1):
            checks.append(_check("boundary", (k, 0), -values[k + 1], table.value(k, 0)))
    return checks


# ---------------------------------------------------------------------------
# exact chain for the weighted cubic


@lru_cache(maxsize=None)
def _case8_triple(k: int):
    """(A, B, p) with values[k] = h^(-p) (A(h) V1 + B(h) V2).

    V1, V2 are the boundary integrals at k = 1, 2 (the sign-flipped
    catalogued periods); all coefficients are exact Fractions.
    """
    if k < 0:
        raise ValueError("chain index must be nonnegative")
    if k == 0:
        return (F(8, 7),), (F(0), F(1, 7)), 0
    if k == 1:
        return (F(1),), (), 0
    if k == 2:
        return (), (F(1),), 0
    a1, b1, p1 = _case8_triple(k - 1)
    a2, b2, p2 = _case8_triple(k - 2)
    p = max(p1, p2)
    c1, c2 = F(8 - 2 * k, 1) / (k - F(5, 2)), (k - F(11, 2)) / (k - F(5, 2))
    a1, b1 = list(a1), list(b1)
    a2, b2 = list(a2), list(b2)
    for _ in range(p - p1):
        a1, b1 = _hshift(a1), _hshift(b1)
    for _ in range(p - p2):
        a2, b2 = _hshift(a2), _hshift(b2)
    a = ptrim(padd(pscale(a1, c1), pscale(a2, c2)))
    b = ptrim(padd(pscale(b1, c1), pscale(b2, c2)))
    p += 1
    while p > 0 and (a or b) and (not a or a[0] == 0) and (not b or b[0] == 0):
        a, b, p = a[1:], b[1:], p - 1
    return tuple(a), tuple(b), p


def case8_pair(k: int):
    """Exact cofactors of the k-th boundary integral against the periods.

    Returns (alpha, beta, prefactor) with
    values[k] = h^prefactor (alpha(h) i1 + beta(h) i2) in terms of the
    positive catalogued periods i1, i2.
    """
    a, b, p = _case8_triple(k)
    return tuple(pscale(list(b), F(-1))), tuple(pscale(list(a), F(-1))), -p


@lru_cache(maxsize=None)
def _area_triple8(k: int, l: int):
    """Exact cofactors of the weighted region moment (k, l) over the periods.

    The y-power recurrence lowers l to zero in steps of two (constant
    coefficients), the boundary identity flips the l = 0 moment into a line
    value, and the chain expresses that over (i1, i2).  Returns
    (alpha, beta, prefactor) in the same convention as case8_pair.
    """
    if k < -1 or l < 0 or l % 2:
        raise ValueError("weighted moment needs k >= -1 and even l >= 0")
    if l == 0:
        a, b, p = case8_pair(k + 1)
        return tuple(pscale(list(a), F(-1))), tuple(pscale(list(b), F(-1))), p
    c = F(2 * l - 2, 2 * k + 3 * l - 3)
    a1, b1, p1 = _area_triple8(k + 2, l - 2)
    a2, b2, p2 = _area_triple8(k + 1, l - 2)
    p = min(p1, p2)
    a1, b1 = list(a1), list(b1)
    a2, b2 = list(a2), list(b2)
    for _ in range(p1 - p):
        a1, b1 = _hshift(a1), _hshift(b1)
    for _ in range(p2 - p):
        a2, b2 = _hshift(a2), _hshift(b2)
    alpha = ptrim(padd(pscale(a1, c), pscale(a2, -c)))
    beta = ptrim(padd(pscale(b1, c), pscale(b2, -c)))
    while p < 0 and (alpha or beta) and \
            (not alpha or alpha[0] == 0) and (not beta or beta[0] == 0):
        alpha, beta, p = alpha[1:], beta[1:], p + 1
    return tuple(alpha), tuple(beta), p


# ---------------------------------------------------------------------------
# reductions


@dataclass(frozen=True)
class Reduction:
    """I(h) ~ h^prefactor (alpha(h) i1(h) + beta(h) i2(h))."""

    case_id: str
    n: int
    alpha: tuple
    beta: tuple
    prefactor: int
    residual: float
    cond: float | None = None


def _as_exact(values):
    out = []
    for v in values:
        if isinstance(v, Fraction):
            out.append(v)
        elif isinstance(v, (int, np.integer)):
            out.append(F(int(v)))
        else:
            return None
    return out


def _combine_pairs(pairs, coeffs):
    exact = _as_exact(coeffs)
    cs = exact if exact is not None else [float(c) for c in coeffs]
    alpha, beta = [], []
    for (a, b), c in zip(pairs, cs):
        if not c:
            continue
        alpha = padd(alpha, pscale(list(a), c))
        beta = padd(beta, pscale(list(b), c))
    return ptrim(alpha), ptrim(beta)


def _validate_keys(case: HamiltonianCase, n: int, c: Mapping) -> None:
    for key in c:
        i, j = key
        if i < 0 or j < 0 or i + j > n - 1:
            raise ValueError(f"moment key {key} outside degree {n} perturbations")
        if case.id == "sym4" and i % 2 == 0:
            raise ValueError(
                f"moment key {key} not admissible for the semi-even family")


def _quadrature_combination(case, h, c, tol):
    oval = cached_oval(case, h, tol)
    total = 0.0
    for (i, j), ck in c.items():
        if not ck or is_zero_moment(case, i, j):
            continue
        total += float(ck) * area_moment(case, h, i, j, tol=tol, oval=oval).value
    return total


def _residual_points(case, m=5):
    grid = sigma_grid(case, 2 * m)
    return grid[::2][:m]


def _model_value(red: Reduction, p) -> float:
    val = peval(list(red.alpha), p.h) * p.i1 + peval(list(red.beta), p.h) * p.i2
    return val * p.h**red.prefactor


def _measure_residual(case, red, lhs_fn, tol) -> float:
    worst = 0.0
    for h in _residual_points(case):
        lhs = lhs_fn(float(h))
        rhs = _model_value(red, periods(case, float(h), tol=tol))
        scale = max(abs(lhs), abs(rhs))
        worst = max(worst, abs(lhs - rhs) / scale if scale else 0.0)
    return worst


def reduce(case: HamiltonianCase, n: int, c, tol: float = QUAD_TOL) -> Reduction:
    """Collapse a degree-n perturbation integral onto the period pair.

    c maps moment keys (i, j) to coefficients for the plain cases, or is a
    sequence of n + 1 chain coefficients for the weighted cubic.  Quartic
    and weighted reductions are exact (Fraction cofactors whenever the
    input coefficients are exact); the other cases go through the
    least-squares fit at the tabulated degrees.  The residual always
    compares the reduced form against direct quadrature at five interior
    levels.
    """
    if case.id == "8":
        if n < 0:
            raise ValueError("perturbation degree must be nonnegative")
        if len(c) != n + 1:
            raise ValueError(f"need n + 1 = {n + 1} chain coefficients")
        triples = [case8_pair(k) for k in range(n + 1)]
        pmax = max((-(t[2]) for t, ck in zip(triples, c) if ck), default=0)
        pairs = []
        for (a, b, p), ck in zip(triples, c):
            a, b = list(a), list(b)
            for _ in range(pmax + p):
                a, b = _hshift(a), _hshift(b)
            pairs.append((a, b))
        alpha, beta = _combine_pairs(pairs, list(c))
        pref = -pmax
        while pref < 0 and (alpha or beta) and \
                (not alpha or alpha[0] == 0) and (not beta or beta[0] == 0):
            alpha, beta, pref = alpha[1:], beta[1:], pref + 1
        red = Reduction(case.id, n, tuple(alpha), tuple(beta), pref, 0.0)
        if alpha or beta:
            lhs = lambda h: float(np.dot([float(v) for v in c],
                                         case8_line_values(h, n, tol=tol)))
            red = Reduction(case.id, n, red.alpha, red.beta, pref,
                            _measure_residual(case, red, lhs, tol))
        return red

    if n < 1:
        raise ValueError("cases 1-7 and sym4 need perturbation degree n >= 1")
    _validate_keys(case, n, c)
    if case.id in QUARTIC_NU:
        nu = QUARTIC_NU[case.id]
        keys = [k for k in sorted(c) if c[k] and not is_zero_moment(case, *k)]
        pairs = [quartic_pair(i, j, nu) for i, j in keys]
        alpha, beta = _combine_pairs(pairs, [c[k] for k in keys])
        red = Reduction(case.id, n, tuple(alpha), tuple(beta), 0, 0.0)
        if alpha or beta:
            live = {k: c[k] for k in keys}
            lhs = lambda h: _quadrature_combination(case, h, live, tol)
            red = Reduction(case.id, n, red.alpha, red.beta, 0,
                            _measure_residual(case, red, lhs, tol))
        return red
    return fit_reduction(case, n, c, tol=tol)


def fit_reduction(case: HamiltonianCase, n: int, c: Mapping,
                  deg_alpha: int | None = None, deg_beta: int | None = None,
                  oversample: int = 3, tol: float = QUAD_TOL) -> Reduction:
    """Least-squares cofactors of given degrees against quadrature.

    Defaults to the tabulated degrees for the case.  The fit runs on an
    oversampled interior grid with unit-normalised columns; the reported
    residual is measured at held-out midpoints, and a condition number
    beyond 1e12 raises (the grid cannot separate the requested degrees).
    """
    _validate_keys(case, n, c)
    ap = application_space(case, n)
    da = ap.deg_alpha if deg_alpha is None else deg_alpha
    db = ap.deg_beta if deg_beta is None else deg_beta
    live = {k: v for k, v in c.items() if v and not is_zero_moment(case, *k)}
    if not live:
        return Reduction(case.id, n, (), (), 0, 0.0, None)
    if da < 0 and db < 0:
        raise ValueError("no cofactor degrees requested for a nonzero input")

    grid = sigma_grid(case, max(12, oversample * (da + db + 2)))
    pers = [periods(case, float(h), tol=tol) for h in grid]
    lhs = np.array([_quadrature_combination(case, float(h), live, tol)
                    for h in grid])
    hs = np.array([p.h for p in pers])
    cols = [hs**a * np.array([p.i1 for p in pers]) for a in range(da + 1)]
    cols += [hs**b * np.array([p.i2 for p in pers]) for b in range(db + 1)]
    design = np.column_stack(cols)
    norms = np.linalg.norm(design, axis=0)
    design = design / norms
    coef, _, _, sv = np.linalg.lstsq(design, lhs, rcond=None)
    cond = sv[0] / sv[-1] if sv[-1] else np.inf
    if cond > 1e12:
        raise ValueError(
            f"ill-conditioned reduction fit (cond {cond:.2e}) for degrees "
            f"({da}, {db}); enlarge the grid or lower the degrees")
    coef = coef / norms
    alpha, beta = tuple(coef[: da + 1]), tuple(coef[da + 1:])
    red = Reduction(case.id, n, alpha, beta, 0, 0.0, float(cond))
    res = 0.0
    mids = 0.5 * (grid[:-1] + grid[1:])
    for h in mids[:: max(1, len(mids) // 5)][:5]:
        lv = _quadrature_combination(case, float(h), live, tol)
        rv = _model_value(red, periods(case, float(h), tol=tol))
        scale = max(abs(lv), abs(rv))
        res = max(res, abs(lv - rv) / scale if scale else 0.0)
    return Reduction(case.id, n, alpha, beta, 0, res, float(cond))


def reduction_degree_scan(case: HamiltonianCase, n: int, c: Mapping,
                          tol: float = QUAD_TOL) -> dict:
    """Fit residuals at the tabulated degrees and one degree short.

    Returns {(deg_alpha, deg_beta): residual}.  A generic input resolves
    cleanly at the tabulated degrees and plateaus well above tolerance
    when either cofactor is shortened, confirming the degrees are sharp.
    """
    ap = application_space(case, n)
    out = {}
    for da, db in [(ap.deg_alpha, ap.deg_beta),
                   (ap.deg_alpha - 1, ap.deg_beta),
                   (ap.deg_alpha, ap.deg_beta - 1)]:
        if da < -1 or db < -1 or (da < 0 and db < 0):
            continue
        red = fit_reduction(case, n, c, deg_alpha=da, deg_beta=db, tol=tol)
        out[(da, db)] = red.residual
    return out


# ---------------------------------------------------------------------------
# dimension checks


def spanning_monomials(case: HamiltonianCase, n: int) -> list[tuple[int, int]]:
    """Moment keys spanning the degree-n perturbation space.

    Plain cases: all (i, j) with i + j <= n - 1 that survive the region
    symmetries.  Semi-even family: additionally i odd.  Weighted cubic:
    (k, l) with k >= -1, l even, k + l <= n - 1.
    """
    if case.id == "8":
        return [(k, l) for l in range(0, n + 1, 2) for k in range(-1, n - l)]
    mons = [(i, j) for i in range(n) for j in range(n - i)
            if not is_zero_moment(case, i, j)]
    if case.id == "sym4":
        mons = [(i, j) for i, j in mons if i % 2 == 1]
    return mons


def _normalized_rank(matrix: np.ndarray, threshold: float) -> int:
    norms = np.linalg.norm(matrix, axis=0)
    keep = norms > 1e-9 * norms.max()
    if not keep.any():
        return 0
    sv = np.linalg.svd(matrix[:, keep] / norms[keep], compute_uv=False)
    return int(np.sum(sv > threshold * sv[0]))


def _exact_span_rank(case: HamiltonianCase, mons) -> int:
    """Rank over the rationals of the exact cofactor pairs of the monomials.

    Valid because the period pair is independent over rational functions:
    a constant-coefficient relation among the moments holds exactly when
    the corresponding polynomial relation holds in both cofactors.
    """
    if case.id == "8":
        triples = [_area_triple8(k, l) for k, l in mons]
        pmin = min(p for _, _, p in triples)
        pairs = []
        for a, b, p in triples:
            a, b = list(a), list(b)
            for _ in range(p - pmin):
                a, b = _hshift(a), _hshift(b)
            pairs.append((a, b))
    else:
        nu = QUARTIC_NU[case.id]
        pairs = [quartic_pair(i, j, nu) for i, j in mons]
    da = max(len(a) for a, b in pairs)
    db = max(len(b) for a, b in pairs)
    rows = [[*a, *[F(0)] * (da - len(a)), *b, *[F(0)] * (db - len(b))]
            for a, b in pairs]
    return _fraction_rank(rows)


def dim_check(case: HamiltonianCase, n: int, tol: float = QUAD_TOL,
              threshold: float = 1e-8) -> int:
    """Rank of the spanning moments as functions of the level.

    Where the recurrences give exact cofactor pairs (the quartics and the
    weighted cubic) the rank is computed exactly over the rationals.  The
    remaining cases use the numerical rank of an evaluation matrix on an
    interior grid: each level contributes the moment values and their
    level-derivatives (both from one boundary sample; relations among the
    moment functions carry over to derivatives, so the extra rows sharpen
    small singular values without overcounting).  Rows and nonzero columns
    are unit-normalised and the rank counts singular values above
    threshold times the largest; a saturated rank (every column
    independent) is confirmed once on a doubled grid.
    """
    if n < (0 if case.id == "8" else 1):
        raise ValueError("perturbation degree too small for this case")
    mons = spanning_monomials(case, n)
    if not mons:
        return 0
    if case.id in QUARTIC_NU or case.id == "8":
        return _exact_span_rank(case, mons)

    def matrix_on(grid):
        rows = []
        for h in grid:
            oval = cached_oval(case, float(h), tol)
            rows.append([area_moment(case, float(h), i, j, tol=tol, oval=oval).value
                         for i, j in mons])
            rows.append([gelfand_leray_derivative(case, float(h), (i, j), oval=oval)
                         for i, j in mons])
        m = np.array(rows)
        return m / np.linalg.norm(m, axis=1, keepdims=True)

    grid = sigma_grid(case, max(8, 3 * len(mons)), margin_h0=0.02, margin_h1=0.02)
    rank = _normalized_rank(matrix_on(grid), threshold)
    if rank == len(mons):
        grid = sigma_grid(case, 2 * len(grid), margin_h0=0.03, margin_h1=0.04)
        rank = _normalized_rank(matrix_on(grid), threshold)
    return rank


# ---------------------------------------------------------------------------
# reporting helpers


def write_residuals_csv(path, checks) -> None:
    """CSV dump of relation checks (one row per recurrence instance)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["relation", "target", "predicted", "actual", "residual"])
        for ch in checks:
            w.writerow([ch.name, " ".join(str(t) for t in ch.target),
                        repr(ch.predicted), repr(ch.actual), repr(ch.residual)])


def _sig15(v) -> float:
    return float(f"{float(v):.15g}")


def reduction_record(red: Reduction) -> dict:
    return {
        "case": red.case_id,
        "n": red.n,
        "alpha": [_sig15(v) for v in red.alpha],
        "beta": [_sig15(v) for v in red.beta],
        "prefactor": red.prefactor,
        "residual": _sig15(red.residual),
    }


def write_reductions_json(path, reductions) -> None:
    """JSON dump of reductions (coefficients to 15 significant digits)."""
    with open(path, "w") as f:
        json.dump([reduction_record(r) for r in reductions], f, indent=2)
        f.write("\n")
