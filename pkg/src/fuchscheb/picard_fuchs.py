"""Local analysis of the period systems in unit coordinates.

After ``to_normal_form(sys, "unit")`` the matrix family has critical values
{0, 1} and the components of the solution vector I = (x, y) satisfy the
scalar equations

    t(t-1) x'' = lam(lam-1) x,      t(t-1) y'' = mu(mu-1) y,

with regular singular points at t = 0, 1, oo.  This module provides

* numeric residuals of the first-order relation I = A(h) I' and of the
  scalar equations above, evaluated on quadrature data;
* the exact matrix identity behind the scalar reduction,
  t(t-1)((A^-1)' + (A^-1)^2) = diag(lam(lam-1), mu(mu-1));
* Frobenius series germs at the three singular points, including the
  resonant log frames and the expansion constants alpha, beta, gamma;
* the terminating (ultra-spherical) polynomial solutions for integer lam;
* a Riccati-based certificate that the solution analytic at 0 keeps a
  fixed sign on the negative half line.

Branch conventions: powers and logarithms of the local variable use the
principal branch, i.e. values on a negative real axis are the limits from
the upper half plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .catalog import (
    FuchsianSystem,
    HamiltonianCase,
    normal_form_template,
    to_normal_form,
)
from .ovals import QUAD_TOL, periods, sigma_grid
from .rational import (
    F,
    MAT_ID,
    Mat2,
    PMat,
    Poly,
    madd,
    mat,
    minv,
    mmul,
    mscale,
    msub,
    mvec,
    pderiv,
    peval,
    pmat_add,
    pmat_from_const,
    pmat_mul,
    pmat_scale_poly,
    pmat_sub,
    pmul,
    pscale,
    psub,
    ptrim,
)

__all__ = [
    "Frame",
    "SolutionGerm",
    "RiccatiReport",
    "analytic_coeffs",
    "unit_system",
    "adjugate_pair",
    "scalar_reduction_defect",
    "relation_residual",
    "residual_fuchsian",
    "residual_hypergeometric",
    "local_germ",
    "germ_eval",
    "scalar_defect",
    "scalar_defect_poly",
    "gegenbauer_solution",
    "riccati_trace",
]


# ---------------------------------------------------------------------------
# unit-form bookkeeping


def unit_system(lam, mu, omega=F(1)) -> FuchsianSystem:
    """Build the unit normal form directly from exponents.

    Useful for synthetic exponent pairs that no catalogued Hamiltonian
    produces.  ``lam`` is the exponent attached to the first component,
    ``mu`` to the second; they must satisfy lam + mu = 2, lam != mu,
    lam*mu != 0.
    """
    lam, mu, omega = F(lam), F(mu), F(omega)
    if lam + mu != 2:
        raise ValueError("exponents must satisfy lam + mu = 2")
    if lam == mu or lam == 0 or mu == 0:
        raise ValueError("exponents must be distinct and nonzero")
    if omega == 0:
        raise ValueError("omega must be nonzero")
    tpl = normal_form_template("unit", lam, mu, omega)
    a0 = tuple(tuple(p[0] if p else F(0) for p in row) for row in tpl)
    a1 = tuple(tuple(p[1] if len(p) > 1 else F(0) for p in row) for row in tpl)
    lo, hi = sorted((lam, mu))
    return FuchsianSystem(a0=a0, a1=a1, h0=F(0), h1=F(1), lam=lo, mu=hi,
                          omega=omega, cut_sign=1)


def _require_unit(sys: FuchsianSystem):
    """Validate the unit form and read back (lam, mu, omega) by slot.

    The exponents are returned in component order (not sorted): the first
    component of I carries lam, the second mu.
    """
    if sys.a1[0][0] == 0 or sys.a1[1][1] == 0:
        raise ValueError("system must be in the unit normal form")
    lam = 1 / sys.a1[0][0]
    mu = 1 / sys.a1[1][1]
    omega = 2 * lam * sys.a0[0][1]
    if (
        lam + mu != 2
        or lam == mu
        or omega == 0
        or sys.pmatrix() != normal_form_template("unit", lam, mu, omega)
    ):
        raise ValueError(
            "system must be in the unit normal form (critical values {0, 1})"
        )
    return lam, mu, omega


def _adj(m: Mat2) -> Mat2:
    return ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))


def _b_matrices(sys: FuchsianSystem, lam, mu):
    """(B1, B0) with (t^2 - t) I' = (t B1 + B0) I in unit coordinates.

    Since det A(t) = t(t-1)/(lam*mu), the inverse family is
    A^-1 = lam*mu*adj(A)/(t^2-t) and the adjugate is affine in t.
    """
    s = lam * mu
    return mscale(_adj(sys.a1), s), mscale(_adj(sys.a0), s)


def adjugate_pair(sys: FuchsianSystem):
    """(N, q) with A(h)^-1 = N(h)/q(h): adjugate matrix and determinant."""
    pm = sys.pmatrix()
    n = (
        (pm[1][1], pscale(pm[0][1], -1)),
        (pscale(pm[1][0], -1), pm[0][0]),
    )
    return n, sys.det_poly()


def scalar_reduction_defect(sys: FuchsianSystem) -> PMat:
    """Exact defect of the second-order reduction; zero for valid systems.

    With N = adj(A), q = det A and T the unit-form frame change, the claim

        (h - h0)(h - h1) ((A^-1)' + (A^-1)^2) = T^-1 diag(lam(lam-1), mu(mu-1)) T

    is equivalent to lam*mu*(N'q - Nq' + N^2) = q * T^-1 D T, whose
    left-minus-right side is returned as a polynomial matrix.
    """
    usys, tr = to_normal_form(sys, "unit")
    lam, mu = usys.lam, usys.mu
    n, q = adjugate_pair(sys)
    np_ = tuple(tuple(pderiv(e) for e in row) for row in n)
    p2 = pmat_add(
        pmat_sub(pmat_scale_poly(np_, q), pmat_scale_poly(n, pderiv(q))),
        pmat_mul(n, n),
    )
    d = mat(lam * (lam - 1), 0, 0, mu * (mu - 1))
    conj = mmul(mmul(minv(tr.T), d), tr.T)
    lhs = pmat_scale_poly(p2, [lam * mu])
    rhs = pmat_scale_poly(pmat_from_const(conj), q)
    return pmat_sub(lhs, rhs)


# ---------------------------------------------------------------------------
# residuals on quadrature data


def relation_residual(case: HamiltonianCase, h: float,
                      i1: float, i2: float, di1: float, di2: float) -> float:
    """Relative residual of I = A(h) I' for given period values.

    Homogeneous of degree 0 in (I, I'); scaling a solution leaves it fixed.
    """
    a = case.system.amatrix_num(h)
    r1 = i1 - (a[0][0] * di1 + a[0][1] * di2)
    r2 = i2 - (a[1][0] * di1 + a[1][1] * di2)
    nrm = math.hypot(i1, i2)
    if nrm == 0.0:
        raise ValueError("trivial period vector")
    return math.hypot(r1, r2) / nrm


def residual_fuchsian(case: HamiltonianCase, h_grid=None,
                      tol: float = QUAD_TOL) -> float:
    """Max over the grid of ||I - A I'|| / ||I|| from quadrature data.

    The default grid keeps a 5% margin from both ends of Sigma.  Both I and
    I' come from independent quadratures (line integral and coarea-weighted
    boundary integral), so the residual genuinely tests the matrix relation.
    """
    if h_grid is None:
        h_grid = sigma_grid(case, 20)
    worst = 0.0
    for h in h_grid:
        p = periods(case, float(h), tol)
        worst = max(worst, relation_residual(case, p.h, p.i1, p.i2, p.di1, p.di2))
    return worst


def residual_hypergeometric(case: HamiltonianCase, t_grid=None,
                            tol: float = QUAD_TOL) -> float:
    """Max residual of t(t-1)x'' = lam(lam-1)x (and the mu twin) over a grid.

    The case is moved to unit coordinates; x, y and their first derivatives
    come from quadrature, while the second derivative is formed analytically
    through the first-order system,

        I'' = (A^-1)' I + A^-1 I',

    never by differencing.  Substituting I' = A^-1 I here would make the
    residual vanish identically (the scalar reduction is an exact matrix
    identity), so the quadrature derivative is kept: what is measured is the
    mutual consistency of the two quadrature routes under the reduction.
    """
    usys, tr = to_normal_form(case.system, "unit")
    lam, mu = float(usys.lam), float(usys.mu)
    klam, kmu = lam * (lam - 1.0), mu * (mu - 1.0)
    n, q = adjugate_pair(usys)
    dq = pderiv(q)
    num = tuple(
        tuple(psub(pmul(pderiv(n[i][j]), q), pmul(n[i][j], dq)) for j in range(2))
        for i in range(2)
    )
    tmat = np.array([[float(v) for v in row] for row in tr.T])
    c = float(tr.h_scale)

    if t_grid is None:
        hs = sigma_grid(case, 10)
        ts = [tr.h_new(float(h)) for h in hs]
    else:
        ts = [float(t) for t in t_grid]
        hs = [tr.h_old(t) for t in ts]

    worst = 0.0
    for t, h in zip(ts, hs):
        if t in (0.0, 1.0):
            raise ValueError("t must avoid the singular points {0, 1}")
        p = periods(case, float(h), tol)
        vec = tmat @ np.array([p.i1, p.i2])
        dvec = c * (tmat @ np.array([p.di1, p.di2]))
        qv = peval(q, t)
        nv = np.array([[peval(n[i][j], t) for j in range(2)] for i in range(2)])
        numv = np.array([[peval(num[i][j], t) for j in range(2)] for i in range(2)])
        ddvec = (numv / qv**2) @ vec + (nv / qv) @ dvec
        tt = t * (t - 1.0)
        if vec[0] == 0.0 or vec[1] == 0.0:
            raise ValueError("nontrivial solution required")
        rx = abs(tt * ddvec[0] - klam * vec[0]) / abs(vec[0])
        ry = abs(tt * ddvec[1] - kmu * vec[1]) / abs(vec[1])
        worst = max(worst, rx, ry)
    return worst


# ---------------------------------------------------------------------------
# Frobenius germs


@dataclass(frozen=True)
class Frame:
    """One Frobenius frame solution around a singular point.

    The (x, y) coefficient at index m multiplies u**(exponent + step*m) in
    the local variable u; step is +1 at finite bases and -1 at infinity
    (descending powers of t).  When ``log_gamma`` is set the solution is

        sum_m series[m] u^(exponent + step*m)
        + log_gamma * log(u) * sum_m log_series[m] u^(log_exponent + step*m).
    """

    exponent: Fraction
    step: int
    series: tuple
    log_gamma: Fraction | None = None
    log_exponent: Fraction | None = None
    log_series: tuple | None = None


@dataclass(frozen=True)
class SolutionGerm:
    """Truncated local solution basis of the unit-form system.

    ``base`` is 0, 1 or math.inf.  ``exponents`` are stated in the local
    variable (t - base at finite points, 1/t at infinity, hence {-lam, -mu}
    there).  ``frames[0]`` is the distinguished/clean solution: at a finite
    base the analytic one vanishing at the base (normalized x'(0) = 1 at
    base 0), at infinity the frame with the smaller growth.  ``frames[1]``
    carries the log term when the exponent gap forces one.

    ``direction`` matters only at infinity: +1 expands in powers of t
    (germ for t -> +oo), -1 in powers of -t (real frames on the negative
    axis).  ``constants`` holds the expansion constants of the germ's own
    direction: gamma at finite bases, alpha/beta (or alpha/gamma when
    resonant) at infinity.
    """

    base: object
    direction: int
    lam: Fraction
    mu: Fraction
    omega: Fraction
    exponents: tuple
    frames: tuple
    constants: dict = field(repr=False)
    trunc_order: int
    radius: float

    @property
    def series(self):
        return self.frames[0].series

    @property
    def log_part(self):
        f = self.frames[1]
        if f.log_gamma in (None, F(0)):
            return None
        return f.log_gamma, f.log_series


def analytic_coeffs(lam, trunc: int):
    """Coefficients a_1..a_trunc of the solution of t(t-1)x'' = lam(lam-1)x
    analytic at 0 with x(0) = 0, x'(0) = 1 (a_1 = 1).

    The recurrence a_{k+1} = a_k (k - lam)(k + lam - 1) / (k(k+1)) follows
    from matching powers of t; it terminates exactly when lam is an integer
    outside {0, 1}.
    """
    lam = F(lam)
    out = [F(1)]
    for k in range(1, trunc):
        out.append(out[-1] * (k - lam) * (k + lam - 1) / (k * (k + 1)))
    return out


def _msolve(m: Mat2, rhs):
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det == 0:
        raise ZeroDivisionError("singular recursion matrix")
    return (
        (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    )


def _right_kernel(m: Mat2):
    """A kernel vector of a singular 2x2 matrix, first nonzero entry 1."""
    for r in m:
        if r != (F(0), F(0)):
            v = (r[1], -r[0])
            s = v[0] if v[0] != 0 else v[1]
            return (v[0] / s, v[1] / s)
    raise ValueError("zero matrix has no distinguished kernel vector")


def _left_kernel(m: Mat2):
    if m[0][0] != 0 or m[1][0] != 0:
        return (m[1][0], -m[0][0])
    return (m[1][1], -m[0][1])


def _solve_rank1(m: Mat2, rhs, gauge: int):
    """Solve a consistent rank-1 system, zeroing the ``gauge`` component."""
    oth = 1 - gauge
    for r in range(2):
        if m[r][oth] != 0:
            val = rhs[r] / m[r][oth]
            v = (val, F(0)) if oth == 0 else (F(0), val)
            rr = 1 - r
            if m[rr][0] * v[0] + m[rr][1] * v[1] != rhs[rr]:
                raise ArithmeticError("inconsistent resonant recursion")
            return v
    raise ArithmeticError("rank-1 solve failed")


def _finite_frames(b1: Mat2, b0: Mat2, base: int, trunc: int):
    """Frobenius frames at a finite singular point (exponents {0, 1}).

    In u = t - base the system reads u(u+e) I' = (u P + Q) I with e = -1 at
    base 0 and e = +1 at base 1; the exponents are the eigenvalues of Q/e.
    """
    e = F(-1) if base == 0 else F(1)
    p = b1
    q = b0 if base == 0 else madd(b1, b0)

    # analytic frame, exponent 1: Q v0 = e v0
    v0 = _right_kernel(msub(q, mscale(MAT_ID, e)))
    if v0[0] != 0:
        v0 = (F(1), v0[1] / v0[0])
    series1 = [v0]
    for m in range(1, trunc):
        mtx = msub(mscale(MAT_ID, e * (1 + m)), q)
        rhs = mvec(msub(p, mscale(MAT_ID, m)), series1[-1])
        series1.append(_msolve(mtx, rhs))

    # exponent-0 frame with log(u) * (analytic frame); gamma from the
    # solvability condition of the rank-1 step at order 1
    w0 = _right_kernel(q)
    m1 = msub(mscale(MAT_ID, e), q)
    phi = _left_kernel(m1)
    rhs1 = mvec(p, w0)
    num = phi[0] * rhs1[0] + phi[1] * rhs1[1]
    den = e * (phi[0] * v0[0] + phi[1] * v0[1])
    gamma = num / den
    gauge = 0 if v0[0] != 0 else 1
    series0 = [w0]
    for m in range(1, trunc):
        rhs = mvec(msub(p, mscale(MAT_ID, m - 1)), series0[-1])
        low = series1[m - 2] if m >= 2 else (F(0), F(0))
        mid = series1[m - 1]
        rhs = (rhs[0] - gamma * (low[0] + e * mid[0]),
               rhs[1] - gamma * (low[1] + e * mid[1]))
        mtx = msub(mscale(MAT_ID, e * m), q)
        if m == 1:
            series0.append(_solve_rank1(mtx, rhs, gauge))
        else:
            series0.append(_msolve(mtx, rhs))

    f1 = Frame(exponent=F(1), step=1, series=tuple(series1))
    glog = None if gamma == 0 else gamma
    f0 = Frame(exponent=F(0), step=1, series=tuple(series0),
               log_gamma=glog, log_exponent=F(1) if glog is not None else None,
               log_series=tuple(series1) if glog is not None else None)
    return (f1, f0), gamma


def _infinity_frames(b1: Mat2, b0: Mat2, direction: int, trunc: int):
    """Frobenius frames at infinity, descending powers of u = direction*t.

    The system becomes (u^2 + c u) I' = (u B1 - c B0) I with c = -direction.
    B1 is diagonal in unit coordinates; the two frames start from the unit
    vectors, the clean one at the smaller exponent.  When the exponent gap
    d is a positive integer the larger frame picks up gamma*log(u) times the
    smaller one, with gamma fixed by the singular row at order d.
    """
    c = F(-direction)
    e0, e1 = b1[0][0], b1[1][1]
    slot_small = 0 if e0 < e1 else 1
    rho_s, rho_b = (e0, e1) if slot_small == 0 else (e1, e0)
    gap = rho_b - rho_s
    resonant = gap.denominator == 1
    d = gap.numerator if resonant else None
    if resonant and trunc <= d:
        raise ValueError(
            f"truncation {trunc} cannot reach the resonance at order {d}"
        )

    def unit_vec(slot):
        return (F(1), F(0)) if slot == 0 else (F(0), F(1))

    def step_rhs(rho, m, prev):
        return mvec(mscale(madd(mscale(MAT_ID, rho - m + 1), b0), -c), prev)

    small = [unit_vec(slot_small)]
    for m in range(1, trunc):
        mtx = msub(mscale(MAT_ID, rho_s - m), b1)
        small.append(_msolve(mtx, step_rhs(rho_s, m, small[-1])))

    gamma = None
    big = [unit_vec(1 - slot_small)]
    for m in range(1, trunc):
        rhs = step_rhs(rho_b, m, big[-1])
        if gamma is not None:
            low = small[m - d - 1] if m - d - 1 >= 0 else (F(0), F(0))
            mid = small[m - d]
            rhs = (rhs[0] - gamma * (mid[0] + c * low[0]),
                   rhs[1] - gamma * (mid[1] + c * low[1]))
        mtx = msub(mscale(MAT_ID, rho_b - m), b1)
        if resonant and m == d:
            # singular row: the small-exponent slot; solvability fixes gamma
            gamma = rhs[slot_small]
            rhs = (rhs[0] - gamma * small[0][0], rhs[1] - gamma * small[0][1])
            big.append(_solve_rank1(mtx, rhs, gauge=slot_small))
        else:
            big.append(_msolve(mtx, rhs))

    fs = Frame(exponent=rho_s, step=-1, series=tuple(small))
    use_log = gamma is not None and gamma != 0
    fb = Frame(exponent=rho_b, step=-1, series=tuple(big),
               log_gamma=gamma if use_log else None,
               log_exponent=rho_s if use_log else None,
               log_series=tuple(small) if use_log else None)

    constants = {"alpha": small[1][1 - slot_small]}
    if resonant:
        constants["gamma"] = gamma if gamma is not None else F(0)
    else:
        constants["beta"] = big[1][slot_small]
    return (fs, fb), constants


def _ratio_radius(frames) -> float:
    """Convergence radius estimate in the local variable by ratio test."""
    k = max(len(f.series) for f in frames)
    norms = []
    for m in range(k):
        n = 0.0
        for f in frames:
            if m < len(f.series):
                n = max(n, abs(float(f.series[m][0])), abs(float(f.series[m][1])))
        norms.append(n)
    ratios = [
        norms[m - 1] / norms[m]
        for m in range(max(1, k - 8), k)
        if norms[m] > 0 and norms[m - 1] > 0
    ]
    if len(ratios) < 3:
        return math.inf
    return float(np.median(ratios))


def local_germ(sys: FuchsianSystem, base, trunc: int = 30,
               direction: int = 1) -> SolutionGerm:
    """Frobenius germ of the unit-form system at base 0, 1 or infinity.

    ``trunc`` >= 2 is the number of retained series coefficients per frame.
    At base 0 the analytic frame is normalized by x'(0) = 1 (so y'(0) =
    1/omega); the exponent-0 frames at finite bases are normalized by
    x(base) = 1.  ``direction`` selects the expansion axis at infinity.
    """
    if trunc < 2:
        raise ValueError("trunc must be at least 2")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    lam, mu, omega = _require_unit(sys)
    b1, b0 = _b_matrices(sys, lam, mu)

    if base in (0, 1):
        if direction != 1:
            raise ValueError("direction applies only to the germ at infinity")
        frames, gamma = _finite_frames(b1, b0, int(base), trunc)
        exps = (F(1), F(0))
        constants = {"gamma": gamma}
    elif base == math.inf or base == "inf":
        frames, constants = _infinity_frames(b1, b0, direction, trunc)
        exps = (-frames[0].exponent, -frames[1].exponent)
        base = math.inf
    else:
        raise ValueError("base must be 0, 1 or infinity")

    return SolutionGerm(
        base=base, direction=direction, lam=lam, mu=mu, omega=omega,
        exponents=exps, frames=frames, constants=constants,
        trunc_order=trunc, radius=_ratio_radius(frames),
    )


def _eval_frame(frame: Frame, u: complex):
    """(x, y, dx/du, dy/du) of one frame at a point of the local variable."""
    logu = None

    def series_val(rho, series):
        x = y = dx = dy = 0.0j
        up = u ** float(rho)
        ustep = u if frame.step == 1 else 1.0 / u
        for m, (cx, cy) in enumerate(series):
            e = float(rho) + frame.step * m
            x += complex(cx) * up
            y += complex(cy) * up
            dx += complex(cx) * e * up / u
            dy += complex(cy) * e * up / u
            up *= ustep
        return x, y, dx, dy

    x, y, dx, dy = series_val(frame.exponent, frame.series)
    if frame.log_gamma is not None:
        logu = cmath.log(u)
        g = complex(frame.log_gamma)
        lx, ly, ldx, ldy = series_val(frame.log_exponent, frame.log_series)
        x += g * logu * lx
        y += g * logu * ly
        dx += g * (logu * ldx + lx / u)
        dy += g * (logu * ldy + ly / u)
    return x, y, dx, dy


def germ_eval(germ: SolutionGerm, t, coeffs=(1.0, 0.0), with_deriv=False):
    """Evaluate a linear combination of the germ's frames at a point.

    Returns (x, y) complex, or (x, y, dx/dt, dy/dt) with ``with_deriv``.
    The point should satisfy |u| < radius (finite base) or |t| > radius
    (infinity); no check is enforced, accuracy simply degrades.
    """
    if germ.base is math.inf or germ.base == math.inf:
        u = complex(germ.direction * t)
        du = float(germ.direction)
    else:
        u = complex(t - germ.base)
        du = 1.0
    if u == 0:
        raise ValueError("evaluation at the expansion base itself")
    x = y = dx = dy = 0.0j
    for cf, frame in zip(coeffs, germ.frames):
        if cf == 0:
            continue
        fx, fy, fdx, fdy = _eval_frame(frame, u)
        x += cf * fx
        y += cf * fy
        dx += cf * fdx
        dy += cf * fdy
    if with_deriv:
        return x, y, dx * du, dy * du
    return x, y


def scalar_defect(germ: SolutionGerm, frame_index: int, component: int = 0):
    """Exact series defect of t(t-1)v'' = k(k-1)v for one frame component.

    Returns {order: coefficient} of the nonzero defect coefficients on the
    exponent grid of the frame; all orders below trunc_order - 1 must
    vanish for a correct germ.  ``component`` 0 checks the x equation
    (k = lam), 1 the y equation (k = mu).
    """
    frame = germ.frames[frame_index]
    kexp = germ.lam if component == 0 else germ.mu
    kk = kexp * (kexp - 1)
    s = frame.step
    # t(t-1) = u(u+e) in the local variable
    if germ.base == 0 or (germ.base == math.inf and germ.direction == 1):
        e = F(-1)
    else:
        e = F(1)
    rho = frame.exponent
    coeffs = [c[component] for c in frame.series]

    out: dict[int, Fraction] = {}

    def add(k, val):
        if val != 0:
            out[k] = out.get(k, F(0)) + val

    for m, cm in enumerate(coeffs):
        em = rho + s * m
        add(m, em * (em - 1) * cm)          # u^2 x'' at its own order
        add(m - s, e * em * (em - 1) * cm)  # e*u*x'' shifts by one power
        add(m, -kk * cm)
    if frame.log_gamma is not None:
        g = frame.log_gamma
        sigma = frame.log_exponent
        off = (sigma - rho) / s
        if off.denominator != 1:
            raise ArithmeticError("misaligned log frame")
        off = off.numerator
        for m, cpair in enumerate(frame.log_series):
            gm = cpair[component]
            em = sigma + s * m
            add(m + off, g * (2 * em - 1) * gm)
            add(m + off - s, g * e * (2 * em - 1) * gm)
    return {k: v for k, v in out.items() if v != 0 and k >= 0}


# ---------------------------------------------------------------------------
# polynomial solutions at integer exponents


def scalar_defect_poly(poly, lam) -> Poly:
    """Exact residual polynomial of t(t-1)p'' - lam(lam-1)p."""
    p = ptrim([F(c) for c in poly])
    if not p:
        raise ValueError("nontrivial solution required")
    lam = F(lam)
    p2 = pderiv(pderiv(p))
    return psub(pmul([F(0), F(-1), F(1)], p2), pscale(p, lam * (lam - 1)))


def gegenbauer_solution(lam) -> Poly:
    """The polynomial solution analytic at 0 for integer lam (not 0 or 1).

    Degree lam for lam >= 2, degree 1 - lam for lam <= -1 (the recurrence
    is invariant under lam -> 1 - lam).  Normalized to leading coefficient
    1; ascending coefficient order.
    """
    lam = F(lam)
    if lam.denominator != 1:
        raise ValueError("lam must be an integer")
    n = lam.numerator
    if n in (0, 1):
        raise ValueError("the equation degenerates for lam in {0, 1}")
    deg = n if n >= 2 else 1 - n
    a = analytic_coeffs(lam, deg)
    coeffs = [F(0)] + a
    lead = coeffs[deg]
    return [c / lead for c in coeffs]


# ---------------------------------------------------------------------------
# Riccati certificate on the negative axis


@dataclass
class RiccatiReport:
    """Outcome of tracing the Riccati companion of the analytic solution.

    With x analytic at 0 (x(0)=0, x'(0)=1) and z' = t x' - lam x, the ratio
    w = z'/x' solves ((t^2-t)/(lam-1)) w' = w^2 - 2tw + t with w(0) = 0.
    For t < 0 the trajectory must stay strictly inside the left branch of
    the isocline hyperbola w^2 - 2tw + t = 0, which pins the signs of x'
    and z' and hence keeps x away from zero.
    """

    lam: float
    lam_used: float
    t_min: float
    ok: bool
    inside_isocline: bool
    w_sign: int
    x_prime_sign_constant: bool
    z_prime_sign_constant: bool
    x_nonvanishing: bool
    ratio_consistency: float
    blow_up: float | None
    t: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    x_prime: np.ndarray = field(repr=False)
    z_prime: np.ndarray = field(repr=False)
    isocline: np.ndarray = field(repr=False)


def riccati_trace(lam, t_range=(-10.0, 0.0), n: int = 800,
                  rtol: float = 1e-10) -> RiccatiReport:
    """Integrate the Riccati companion over [t_min, 0) and report signs.

    Requires non-integer lam.  The argument is stated for lam < 1; for
    lam > 1 the equation is unchanged under lam -> 1 - lam (the coefficient
    lam(lam-1) is invariant), so that branch is traced instead and recorded
    in ``lam_used``.
    """
    lam = F(lam)
    if lam.denominator == 1:
        raise ValueError("lam must not be an integer")
    lam_used = lam if lam < 1 else 1 - lam
    t_min = float(t_range[0])
    if t_min >= 0:
        raise ValueError("t_range must start below 0")

    lf = float(lam_used)
    lf1 = lf - 1.0

    # series start just left of the origin
    eps = 1e-6
    acoef = analytic_coeffs(lam_used, 12)
    t0 = -eps
    x0 = sum(float(a) * t0 ** (k + 1) for k, a in enumerate(acoef))
    p0 = sum(float(a) * (k + 1) * t0**k for k, a in enumerate(acoef))
    q0 = t0 * p0 - lf * x0
    w1 = 1 - lf
    w2 = lf * lf * (1 - lf) / 2
    w3 = (2 * w2 / 3) * (1 + lf * (lf - 1))
    w0 = w1 * t0 + w2 * t0**2 + w3 * t0**3

    def rhs(t, v):
        w, x, p, q = v
        den = t * t - t
        return (
            lf1 * (w * w - 2 * t * w + t) / den,
            p,
            lf1 * (t * p - q) / den,
            lf1 * t * (p - q) / den,
        )

    def blow(t, v):
        return 1e8 - abs(v[0])

    blow.terminal = True
    t_eval = -np.geomspace(eps, -t_min, n)
    sol = solve_ivp(rhs, (t0, t_min), (w0, x0, p0, q0), method="DOP853",
                    rtol=rtol, atol=1e-13, t_eval=t_eval, events=blow)
    blow_up = float(sol.t_events[0][0]) if len(sol.t_events[0]) else None

    t = sol.t
    w, x, p, q = sol.y
    iso = w * w - 2 * t * w + t
    inside = bool(np.all(iso < 0))
    wsign = -1 if (1 - lf) > 0 else 1
    w_const = bool(np.all(np.sign(w) == wsign))
    p_const = bool(np.all(p > 0))
    q_const = bool(np.all(np.sign(q) == wsign))
    x_nonzero = bool(np.all(x < 0))
    ratio = float(np.max(np.abs(w - q / p)) / max(np.max(np.abs(w)), 1e-300))
    ok = (sol.success and blow_up is None and inside and w_const
          and p_const and q_const and x_nonzero)
    return RiccatiReport(
        lam=float(lam), lam_used=lf, t_min=t_min, ok=bool(ok),
        inside_isocline=inside, w_sign=wsign,
        x_prime_sign_constant=p_const, z_prime_sign_constant=q_const,
        x_nonvanishing=x_nonzero, ratio_consistency=ratio, blow_up=blow_up,
        t=t, w=w, x=x, x_prime=p, z_prime=q, isocline=iso,
    )
