"""Real-line zero bounds via the operator L = t(t-1) d^2/dt^2.

The unit-form solution pair is an eigenvector of the diagonal operator
L = diag(L, L): L I = Omega_0 I.  Multiplying by t^k shifts the eigendata
by explicit matrices, L(t^k I) = t^k Omega_k I - t^{k-1} R_k I, and a
downward Sylvester recursion assembles polynomial combinations x_k, y_k
that are genuine scalar eigenfunctions of L.  Since neither component
vanishes on t < 0, an elimination argument bounds the zeros of any
combination P x + Q y on the negative axis by deg P + deg Q + 1 — and when
the exponent gap is below one the space is outright Chebyshev there.

The recursion is carried out in exact rational arithmetic; floats appear
only in the quadrature-backed residual checks and the zero counting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .catalog import FuchsianSystem, HamiltonianCase
from .continuation import count_zeros_interval
from .ovals import QUAD_TOL, periods, sigma_grid
from .picard_fuchs import _b_matrices, _require_unit, to_normal_form
from .rational import F, Mat2, mat, mfloat, mmul, pdeg
from .vspace import VSpaceElement, dim_vs

__all__ = [
    "OperatorData",
    "EigenFrame",
    "SturmVerdict",
    "operator_data",
    "operator_identity_residual",
    "eigenframe",
    "eigen_residual",
    "real_zero_bound_check",
    "negative_axis_image",
    "write_sturm_csv",
]


@dataclass(frozen=True)
class OperatorData:
    """Shift data of L against multiplication by t^k (exact rationals)."""

    k: int
    omega_odd: Fraction
    omega_even: Fraction
    Omega: Mat2
    Rk: Mat2


@dataclass(frozen=True)
class EigenFrame:
    """Matrices B_k..B_0 of the eigenfunction pair I_k = sum B_j t^j I.

    ``B`` is stored in descending order (B_k first, the identity).
    ``xk_series`` and ``yk_series`` hold the polynomial cofactors of the
    two scalar eigenfunctions: x_k = xk_series[0](t) x + xk_series[1](t) y
    and likewise y_k, coefficients ascending in t.  The leading form is
    monic of degree k in the own component and degree <= k-1 in the other.
    """

    k: int
    B: tuple
    xk_series: tuple
    yk_series: tuple


def operator_data(k: int, lam, mu, omega) -> OperatorData:
    """Exact Omega_k and R_k for the unit form with exponents (lam, mu)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    lam, mu, omega = F(lam), F(mu), F(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    w_odd = (k + lam) * (k + lam - 1)
    w_even = (k + mu) * (k + mu - 1)
    return OperatorData(
        k=k,
        omega_odd=w_odd,
        omega_even=w_even,
        Omega=mat(w_odd, 0, 0, w_even),
        Rk=mat(k * (lam + k - 1), k * mu * omega,
               k * lam / omega, k * (mu + k - 1)),
    )


def _omega_scalar(j: int, lam, mu) -> Fraction:
    """omega_j for j >= 1 (odd indices carry lam, even indices mu)."""
    if j % 2:
        k = (j - 1) // 2
        return (k + lam) * (k + lam - 1)
    k = (j - 2) // 2
    return (k + mu) * (k + mu - 1)


def eigenframe(k: int, lam, mu, omega) -> EigenFrame:
    """Solve the Sylvester recursion for B_{k-1}, ..., B_0 exactly.

    Each equation B_j Omega_j - Omega_k B_j = B_{j+1} R_{j+1} decouples
    entrywise because the Omegas are diagonal; the entry divisors are
    differences of distinct omega values whenever 2*lam is not an integer.
    A coincident pair raises (the recursion is then genuinely obstructed).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    lam, mu, omega = F(lam), F(mu), F(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    Bs = {k: mat(1, 0, 0, 1)}
    Ok = operator_data(k, lam, mu, omega).Omega
    for j in range(k - 1, -1, -1):
        Rj1 = operator_data(j + 1, lam, mu, omega).Rk
        C = mmul(Bs[j + 1], Rj1)
        Oj = operator_data(j, lam, mu, omega).Omega
        rows = []
        for a in range(2):
            row = []
            for b in range(2):
                d = Oj[b][b] - Ok[a][a]
                if d == 0:
                    raise ValueError(
                        f"coincident omega values at (j={j}, entry {a}{b}); "
                        "the recursion needs 2*lam not an integer")
                row.append(C[a][b] / d)
            rows.append(tuple(row))
        Bs[j] = (rows[0], rows[1])
    px = tuple(Bs[j][0][0] for j in range(k + 1))
    qx = tuple(Bs[j][0][1] for j in range(k + 1))
    py = tuple(Bs[j][1][0] for j in range(k + 1))
    qy = tuple(Bs[j][1][1] for j in range(k + 1))
    return EigenFrame(
        k=k,
        B=tuple(Bs[j] for j in range(k, -1, -1)),
        xk_series=(px, qx),
        yk_series=(py, qy),
    )


# ---------------------------------------------------------------------------
# quadrature-backed residuals


def _unit_quadrature(case: HamiltonianCase, ts, tol):
    """Gauged (x, y) values of the period pair at unit points ts."""
    usys, tr = to_normal_form(case.system, "unit")
    tmat = np.array([[float(v) for v in row] for row in tr.T])
    vals = []
    for t in ts:
        p = periods(case, tr.h_old(float(t)), tol=tol)
        vals.append(tmat @ np.array([p.i1, p.i2]))
    return usys, np.array(vals)


def _derivative_matrices(usys: FuchsianSystem):
    """Callables M(t), M'(t) with I' = M I for the unit system."""
    lam, mu, _ = _require_unit(usys)
    b1, b0 = _b_matrices(usys, lam, mu)
    B1 = np.array(mfloat(b1))
    B0 = np.array(mfloat(b0))

    def M(t: float):
        return (t * B1 + B0) / (t * t - t)

    def Mp(t: float):
        return B1 / (t * t - t) - (t * B1 + B0) * (2 * t - 1) / (t * t - t) ** 2

    return M, Mp


def _default_grid(case: HamiltonianCase) -> tuple:
    """Five unit-coordinate points with live ovals (Sigma interior).

    For most cases this lands inside (0, 1); when the oval interval sits
    on the far side of the first critical value (negative unit axis) the
    grid follows it there — the shift identities are ODE identities and
    hold wherever the solutions do.
    """
    _, tr = to_normal_form(case.system, "unit")
    return tuple(float(tr.h_new(h)) for h in sigma_grid(case, 5))


def _check_grid(ts) -> tuple:
    ts = tuple(float(t) for t in ts)
    if not ts:
        raise ValueError("empty grid")
    if any(abs(t) < 1e-9 or abs(t - 1.0) < 1e-9 for t in ts):
        raise ValueError("grid points must avoid the singular points 0 and 1")
    return ts


def operator_identity_residual(case: HamiltonianCase, k: int, t_grid=None,
                               tol: float = QUAD_TOL) -> float:
    """Residual of L(t^k I) = t^k Omega_k I - t^{k-1} R_k I on quadrature.

    The second derivative is taken analytically through I' = M(t) I, so
    the check couples the shift algebra to the first-order system on
    independently integrated period data.  k = 0 degenerates to the
    eigen-relation L I = Omega_0 I.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    ts = _default_grid(case) if t_grid is None else _check_grid(t_grid)
    usys, vals = _unit_quadrature(case, ts, tol)
    lam, mu, om = _require_unit(usys)
    od = operator_data(k, lam, mu, om)
    Ok = np.array(mfloat(od.Omega))
    Rk = np.array(mfloat(od.Rk))
    M, Mp = _derivative_matrices(usys)
    worst = 0.0
    for t, I in zip(ts, vals):
        t = float(t)
        Mt = M(t)
        # (t^k I)'' expanded by Leibniz; I'' = (M' + M^2) I
        second = Mp(t) + Mt @ Mt
        bracket = t**k * second + 2 * k * t ** (k - 1) * Mt if k else second
        if k >= 2:
            bracket = bracket + k * (k - 1) * t ** (k - 2) * np.eye(2)
        lhs = t * (t - 1) * bracket @ I
        rhs = t**k * (Ok @ I) - (t ** (k - 1) * (Rk @ I) if k else 0.0)
        scale = max(np.max(np.abs(rhs)), np.max(np.abs(I)), 1e-300)
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
    return worst


def eigen_residual(case: HamiltonianCase, k: int, which: str = "x",
                   t_grid=None, tol: float = QUAD_TOL) -> float:
    """Residual of L x_k = omega_{2k+1} x_k (or the y_k relation).

    The eigenfunction is assembled from the exact frame, then L is applied
    by analytic differentiation of the cofactor row against quadrature
    values — an independent route from the Sylvester algebra that produced
    the frame.
    """
    if which not in ("x", "y"):
        raise ValueError("which must be 'x' or 'y'")
    if k < 0:
        raise ValueError("k must be nonnegative")
    ts = _default_grid(case) if t_grid is None else _check_grid(t_grid)
    usys, vals = _unit_quadrature(case, ts, tol)
    lam, mu, om = _require_unit(usys)
    frame = eigenframe(k, lam, mu, om)
    row = 0 if which == "x" else 1
    eig = float(operator_data(k, lam, mu, om).Omega[row][row])
    series = frame.xk_series if which == "x" else frame.yk_series
    cof = np.array([[float(c) for c in series[0]],
                    [float(c) for c in series[1]]])
    M, Mp = _derivative_matrices(usys)
    worst = 0.0
    for t, I in zip(ts, vals):
        t = float(t)
        pw = t ** np.arange(k + 1)
        v = cof.T * pw[:, None]        # per-degree row vectors
        v0 = v.sum(axis=0)
        v1 = (np.arange(k + 1)[:, None] * cof.T
              * np.concatenate(([0.0], pw[:-1]))[:, None]).sum(axis=0)
        v2 = ((np.arange(k + 1) * (np.arange(k + 1) - 1))[:, None] * cof.T
              * np.concatenate(([0.0, 0.0], pw[:-2]))[:, None]).sum(axis=0)
        Mt = M(t)
        second = v2 + 2 * v1 @ Mt + v0 @ (Mp(t) + Mt @ Mt)
        lhs = t * (t - 1) * second @ I
        rhs = eig * (v0 @ I)
        scale = max(abs(rhs), np.max(np.abs(I)), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


# ---------------------------------------------------------------------------
# the real-interval bound


@dataclass(frozen=True)
class SturmVerdict:
    """Zero count of one element on the negative axis against its bounds.

    ``ok`` judges the elimination bound deg P + deg Q + 1.  When the
    exponent gap is below one (``chebyshev``) the space is Chebyshev
    there, so ``cheb_bound`` = dim V_s - 1 applies too and ``cheb_ok``
    reports it; both are None otherwise.
    """

    zero_count: int
    bound: int
    ok: bool
    chebyshev: bool
    cheb_bound: int | None
    cheb_ok: bool | None
    interval: tuple


def real_zero_bound_check(elem: VSpaceElement, margin: float = 1e-6,
                          resolution: float = 1e-10) -> SturmVerdict:
    """Count zeros of P x + Q y on (-oo, 0) and judge the appendix bounds.

    The count runs on (-oo, -margin) with the unbounded tail settled by
    the expansion at infinity.  Requires a non-integer doubled exponent
    (2*lam), the hypothesis that keeps the omega ladder distinct.
    """
    lam, mu, _ = _require_unit(elem.system)
    if (2 * lam).denominator == 1:
        raise ValueError("the negative-axis bound needs 2*lam non-integer")
    if not any(elem.P) and not any(elem.Q):
        raise ValueError("cannot bound the zero combination")
    count = count_zeros_interval(elem, (-math.inf, -margin),
                                 resolution=resolution)
    bound = max(pdeg(list(elem.P)), 0) + max(pdeg(list(elem.Q)), 0) + 1
    cheb = abs(lam - mu) < 1
    cheb_bound = dim_vs(lam, mu, elem.s) - 1 if cheb else None
    return SturmVerdict(zero_count=count, bound=bound, ok=count <= bound,
                        chebyshev=cheb, cheb_bound=cheb_bound,
                        cheb_ok=None if cheb_bound is None
                        else count <= cheb_bound,
                        interval=(-math.inf, -margin))


def negative_axis_image(case: HamiltonianCase) -> str:
    """The h-interval the negative t-axis corresponds to for one case.

    The unit substitution sends h0 to 0 and h1 to 1, so t < 0 is the h
    side beyond the center value: (-oo, h0) when h1 > h0, mirrored to
    (h0, +oo) otherwise (where the determinant keeps its sign).
    """
    sys = case.system
    if sys.h1 > sys.h0:
        return f"(-oo, {sys.h0})"
    return f"({sys.h0}, +oo)"


def write_sturm_csv(path, rows) -> None:
    """CSV dump of negative-axis sweep rows: case, trial, count, bound,
    pass."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case", "trial", "count", "bound", "pass"])
        for row in rows:
            w.writerow([row["case"], row["trial"], row["count"],
                        row["bound"], int(row["pass"])])
