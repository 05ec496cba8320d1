"""Oval tracing and quadrature for the catalogued Hamiltonians.

An oval is the closed component of {H = h} around the case's center.  It is
traced in polar coordinates about the center (all catalogued ovals are
star-shaped there): for each angle the radius solves H = h by vectorised
bisection plus a Newton polish.  A predictor-corrector marcher is kept as a
fallback for inputs that fail the star-shape validation.

Closed-curve integrals use the periodic trapezoid rule, which converges
geometrically in the number of sample points for these analytic curves; the
point count is refined by doubling until a probe set of monomial line
integrals (total degree <= 8) is stable to the requested tolerance, and the
last doubling difference is reported as the error estimate.

Derivatives in h are Gelfand-Leray integrals, not finite differences:
d/dh of an area integral of phi over the bounded region is the line integral
of phi/|grad H| ds, signed by whether the region grows or shrinks with h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import HamiltonianCase, OneForm, h_eval, h_grad

TRACE_TOL = 1e-12
QUAD_TOL = 1e-10
_RMAX = 1e9


class TraceError(RuntimeError):
    pass


@dataclass
class OvalSample:
    """A closed, positively oriented discretisation of one oval."""

    case: HamiltonianCase
    h: float
    arc_param: np.ndarray  # closed parameter grid, length n+1
    points: np.ndarray  # (n+1, 2), first row == last row
    residual: float  # max |H - h| over the points
    quad_error: float  # probe-set doubling difference at the final n
    # open-grid arrays used by the quadrature routines (length n)
    x: np.ndarray
    y: np.ndarray
    dx: np.ndarray  # dx/dtheta
    dy: np.ndarray  # dy/dtheta

    @property
    def n(self) -> int:
        return self.x.size

    def winding_number(self) -> int:
        cx, cy = self.case.center
        ang = np.arctan2(self.points[:, 1] - cy, self.points[:, 0] - cx)
        return int(round(np.sum(np.diff(np.unwrap(ang))) / (2 * np.pi)))


@dataclass(frozen=True)
class MomentIntegral:
    i: int
    j: int
    h: float
    value: float
    est_error: float


def region_growth_sign(case: HamiltonianCase) -> int:
    """+1 when the bounded region grows with h (h0 at the lower end of Sigma)."""
    return 1 if case.sigma[0] == case.system.h0 else -1


def _sigma_check(case: HamiltonianCase, h: float) -> None:
    lo, hi = case.sigma
    ok = h > float(lo) and (hi is None or h < float(hi))
    if not ok:
        hi_s = "oo" if hi is None else float(hi)
        raise ValueError(f"h={h} outside the oval interval ({float(lo)}, {hi_s})")


def _needs_positive_x(case: HamiltonianCase) -> bool:
    return any(i < 0 for i, _ in case.h_terms)


def _level(case: HamiltonianCase, x, y, h):
    if _needs_positive_x(case):
        x = np.maximum(x, 1e-9)  # H blows up as x -> 0+; keep the sign right
    return h_eval(case, x, y) - h


def _ray_cap(case: HamiltonianCase, ct: float) -> float:
    # stay strictly inside x > 0 when H has negative x-powers
    if _needs_positive_x(case) and ct < 0:
        return (1 - 1e-6) * case.center[0] / (-ct)
    return _RMAX


def _newton_radii(case, h, ct, st, r, iters=60):
    """Polish radii onto {H = h} along rays from the center (vectorised)."""
    cx, cy = case.center
    for _ in range(iters):
        xx, yy = cx + r * ct, cy + r * st
        f = h_eval(case, xx, yy) - h
        gx, gy = h_grad(case, xx, yy)
        gr = gx * ct + gy * st
        step = np.clip(f / gr, -0.2 * r, 0.2 * r)
        r = r - step
        if np.max(np.abs(f)) < 1e-15 * max(1.0, abs(h)):
            break
    return r


def _seed_radius(case: HamiltonianCase, h: float, theta: float = 0.0) -> float:
    """First oval crossing along one ray, by a finely subdivided scan.

    Near-saddle levels leave only a narrow radial window with the opposite
    sign, so each expansion segment is sampled at 64 interior points before
    moving on; the first sign flip is the oval.
    """
    cx, cy = case.center
    ct, st = math.cos(theta), math.sin(theta)
    s0 = np.sign(_level(case, np.array(cx), np.array(cy), h))
    if s0 == 0:
        raise TraceError("level value equals the center value")
    cap = _ray_cap(case, ct)
    lo, hi = 0.0, min(0.05, cap)
    for _ in range(200):
        rs = np.linspace(lo, hi, 65)[1:]
        f = _level(case, cx + rs * ct, cy + rs * st, h)
        flip = np.nonzero(np.sign(f) != s0)[0]
        if flip.size:
            k = int(flip[0])
            rlo, rhi = (rs[k - 1] if k else lo), rs[k]
            break
        if hi >= cap:
            raise TraceError("no level crossing along the seed ray (open component?)")
        lo, hi = hi, min(hi * 1.4, cap)
    else:
        raise TraceError("level set appears unbounded along the seed ray")

    for _ in range(60):
        rm = 0.5 * (rlo + rhi)
        f = float(_level(case, np.array(cx + rm * ct), np.array(cy + rm * st), h))
        if np.sign(f) == s0:
            rlo = rm
        else:
            rhi = rm
    r = float(_newton_radii(case, h, np.array(ct), np.array(st), np.array(0.5 * (rlo + rhi))))
    if not np.isfinite(r) or r <= 0:
        raise TraceError("seed ray polishing failed")
    return r


def _walk_radii(case: HamiltonianCase, h: float, n: int) -> np.ndarray:
    """Radii on a uniform angle grid by continuation from the seed ray."""
    r0 = _seed_radius(case, h)
    theta = 2 * np.pi * np.arange(n) / n
    r = np.empty(n)
    r[0] = r0
    guess = r0
    for k in range(1, n):
        ct, st = math.cos(theta[k]), math.sin(theta[k])
        rk = float(_newton_radii(case, h, np.array(ct), np.array(st), np.array(guess), iters=12))
        if not np.isfinite(rk) or rk <= 0 or rk > _ray_cap(case, ct):
            raise TraceError(f"continuation lost the oval at angle {theta[k]:.3f}")
        r[k] = rk
        guess = 2 * rk - r[k - 1] if k > 1 else rk  # linear predictor
        guess = max(guess, 1e-12)
    return r


def _double_radii(case, h, r: np.ndarray) -> np.ndarray:
    """Insert midpoint angles, seeding Newton from neighbour averages."""
    n = r.size
    mids_guess = 0.5 * (r + np.roll(r, -1))
    theta_m = 2 * np.pi * (np.arange(n) + 0.5) / n
    rm = _newton_radii(case, h, np.cos(theta_m), np.sin(theta_m), mids_guess, iters=30)
    if np.any(~np.isfinite(rm)) or np.any(rm <= 0):
        raise TraceError("refinement lost the oval")
    out = np.empty(2 * n)
    out[0::2], out[1::2] = r, rm
    return out


def _derivatives(case, theta, r):
    cx, cy = case.center
    ct, st = np.cos(theta), np.sin(theta)
    x, y = cx + r * ct, cy + r * st
    gx, gy = h_grad(case, x, y)
    # implicit differentiation of H(c + r e(theta)) = h
    ge = gx * ct + gy * st
    gperp = -gx * r * st + gy * r * ct
    rp = -gperp / ge
    dx = rp * ct - r * st
    dy = rp * st + r * ct
    return x, y, dx, dy


def _sample(case: HamiltonianCase, h: float, n: int, n0: int = 256):
    r = _walk_radii(case, h, min(n, n0))
    while r.size < n:
        r = _double_radii(case, h, r)
    theta = 2 * np.pi * np.arange(n) / n
    x, y, dx, dy = _derivatives(case, theta, r)
    return theta, x, y, dx, dy


_PROBES = [(a, b) for a in range(9) for b in range(9 - a)]


def _probe_vector(case, x, y, dx, dy):
    vals = []
    extra = [(a, b) for a in (-5, -4, -3, -2, -1) for b in (1, 2)] if _needs_positive_x(case) else []
    for a, b in _PROBES + extra:
        mono = x**a * y**b
        vals.append(np.mean(mono * dx))
        vals.append(np.mean(mono * dy))
    return 2 * np.pi * np.asarray(vals)


_CACHE: dict = {}


def trace_oval(case: HamiltonianCase, h: float, tol: float = QUAD_TOL,
               n0: int = 256, nmax: int = 65536) -> OvalSample:
    """Trace the closed level component of {H = h} around the case center.

    The returned sample is positively oriented (winding +1), has pointwise
    residual below TRACE_TOL, and enough points that every monomial line
    integral of total degree <= 8 is converged to ``tol``.
    """
    _sigma_check(case, h)
    h = float(h)
    r = _walk_radii(case, h, n0)
    prev = None
    while True:
        n = r.size
        theta = 2 * np.pi * np.arange(n) / n
        x, y, dx, dy = _derivatives(case, theta, r)
        if np.any(x * 0 != 0) or np.any(np.isnan(dx)):
            raise TraceError("tracing produced non-finite values")
        probes = _probe_vector(case, x, y, dx, dy)
        if prev is not None:
            err = float(np.max(np.abs(probes - prev)))
            scale = max(1.0, float(np.max(np.abs(probes))))
            if err <= tol * scale:
                break
        if n >= nmax:
            raise TraceError(f"quadrature did not converge by n={n}")
        prev, r = probes, _double_radii(case, h, r)

    if _needs_positive_x(case) and x.min() < 1e-3:
        raise TraceError("oval too close to the x = 0 singular line")

    resid = float(np.max(np.abs(h_eval(case, x, y) - h)))
    scale = max(1.0, abs(h))
    if resid > TRACE_TOL * scale:
        raise TraceError(f"tracing residual {resid} too large")

    pts = np.column_stack([np.append(x, x[0]), np.append(y, y[0])])
    par = np.append(theta, 2 * np.pi)
    return OvalSample(case=case, h=h, arc_param=par, points=pts,
                      residual=resid, quad_error=err, x=x, y=y, dx=dx, dy=dy)


def cached_oval(case: HamiltonianCase, h: float, tol: float = QUAD_TOL) -> OvalSample:
    key = (case.id, str(case.param_a), float(h), tol)
    got = _CACHE.get(key)
    if got is None:
        got = _CACHE[key] = trace_oval(case, h, tol)
    return got


# ---------------------------------------------------------------------------
# integrals


def _halves(vals):
    """Full-grid mean and the doubling difference against the even subgrid."""
    full = float(np.mean(vals))
    half = float(np.mean(vals[::2]))
    return full, abs(full - half)


def line_integral(oval: OvalSample, form: OneForm, m_xpow: int | None = None,
                  with_error: bool = False):
    """Closed line integral of x^a y^b d(var), optionally weighted by x^m."""
    a = form.xpow + (m_xpow or 0)
    if a < 0 and oval.x.min() <= 1e-3:
        raise ValueError("negative x-power but the oval approaches x = 0")
    vals = oval.x**a * oval.y**form.ypow * (oval.dx if form.var == "x" else oval.dy)
    mean, err = _halves(vals)
    value, err = 2 * np.pi * mean, 2 * np.pi * err
    return (value, err) if with_error else value


def area_moment(case: HamiltonianCase, h: float, i: int, j: int,
                tol: float = QUAD_TOL, oval: OvalSample | None = None) -> MomentIntegral:
    """The moment of x^i y^j over the bounded region (times M for case 8).

    Computed by Green's theorem from the boundary sample; the two possible
    reductions (through dx and through dy) are averaged and their spread is
    folded into the error estimate.
    """
    if oval is None:
        oval = cached_oval(case, h, tol)
    m = case.m_xpow or 0
    v1, e1 = line_integral(oval, OneForm(i + m, j + 1, "x"), with_error=True)
    v1, e1 = -v1 / (j + 1), e1 / (j + 1)
    if i + m == -1:
        value, err = v1, e1  # dy route would need log(x); use the dx route only
    else:
        v2, e2 = line_integral(oval, OneForm(i + m + 1, j, "y"), with_error=True)
        v2, e2 = v2 / (i + m + 1), e2 / (i + m + 1)
        value = 0.5 * (v1 + v2)
        err = max(e1, e2, abs(v1 - v2))
    return MomentIntegral(i=i, j=j, h=float(h), value=value, est_error=err)


def gelfand_leray_derivative(case: HamiltonianCase, h: float, form,
                             tol: float = QUAD_TOL, oval: OvalSample | None = None,
                             with_error: bool = False):
    """d/dh of a line integral (OneForm) or area moment (pair (i, j)).

    A line integral is first converted by Stokes to the area integral of
    g_x - f_y; the h-derivative of an area integral of phi is the coarea
    integral of phi/|grad H| ds over the oval, signed by region growth.

    A OneForm is taken literally (any weight must already be in its
    exponents); the (i, j) area flavour applies the case's integrating
    factor, matching area_moment.
    """
    if oval is None:
        oval = cached_oval(case, h, tol)
    m = case.m_xpow or 0
    if isinstance(form, OneForm):
        a, b = form.xpow, form.ypow
        if form.var == "x":  # d(f dx) = -f_y dxdy
            phi = -b * oval.x**a * oval.y ** (b - 1) if b else 0.0 * oval.x
        else:  # d(g dy) = +g_x dxdy
            phi = a * oval.x ** (a - 1) * oval.y**b if a else 0.0 * oval.x
    else:
        i, j = form
        phi = oval.x ** (i + m) * oval.y**j

    gx, gy = h_grad(case, oval.x, oval.y)
    speed = np.hypot(oval.dx, oval.dy)
    grad = np.hypot(gx, gy)
    vals = phi * speed / grad
    mean, err = _halves(vals)
    sgn = region_growth_sign(case)
    value = sgn * 2 * np.pi * mean
    return (value, 2 * np.pi * err) if with_error else value


# ---------------------------------------------------------------------------
# the period vector of a case


@dataclass(frozen=True)
class PeriodValues:
    """I = (I1, I2) and the Gelfand-Leray I' at one level, sign-normalised."""

    h: float
    i1: float
    i2: float
    di1: float
    di2: float
    est_error: float


def periods(case: HamiltonianCase, h: float, tol: float = QUAD_TOL) -> PeriodValues:
    """Period vector of (form1, form2) with I1 > 0 on Sigma.

    The raw positively oriented values are multiplied by the catalogued
    orientation sign, so the Fuchsian relation I = A I' is unchanged.
    """
    oval = cached_oval(case, h, tol)
    s = case.orientation_sign
    i1, e1 = line_integral(oval, case.form1, with_error=True)
    i2, e2 = line_integral(oval, case.form2, with_error=True)
    d1, g1 = gelfand_leray_derivative(case, h, case.form1, oval=oval, with_error=True)
    d2, g2 = gelfand_leray_derivative(case, h, case.form2, oval=oval, with_error=True)
    return PeriodValues(h=float(h), i1=s * i1, i2=s * i2, di1=s * d1, di2=s * d2,
                        est_error=max(e1, e2, g1, g2))


def sigma_grid(case: HamiltonianCase, n: int, margin_h0: float = 0.05,
               margin_h1: float = 0.05, hi_cap: float = 10.0) -> np.ndarray:
    """n interior levels of Sigma (an unbounded Sigma is capped at hi_cap).

    Margins are relative to the (capped) interval width and are applied
    separately at the analytic end h0 and at the saddle end, where the oval
    geometry degenerates and tight approaches are expensive.
    """
    lo, hi = case.sigma
    lo = float(lo)
    hi = hi_cap if hi is None else float(hi)
    width = hi - lo
    m_lo, m_hi = margin_h0, margin_h1
    if float(case.system.h0) != lo:
        m_lo, m_hi = m_hi, m_lo
    return np.linspace(lo + m_lo * width, hi - m_hi * width, n)


# ---------------------------------------------------------------------------
# fallback tracer (kept for robustness; catalog ovals are star-shaped)


def trace_oval_marching(case: HamiltonianCase, h: float, n: int = 4096,
                        max_steps: int = 200000) -> OvalSample:
    """Predictor-corrector fallback: march along {H = h}, then resample.

    Slower and slightly less accurate than the polar tracer; used only when
    the star-shape assumption fails.  The returned sample reuses the polar
    quadrature layout (uniform angle grid) by interpolating the marched
    radius as a function of the polar angle, which still assumes the curve
    is a radial graph; a genuinely non-star-shaped input raises TraceError.
    """
    _sigma_check(case, h)
    cx, cy = case.center
    r0 = _seed_radius(case, h)
    x, y = cx + r0, cy
    sgn = region_growth_sign(case)
    pts = [(x, y)]
    scale = r0
    step = 2 * np.pi * scale / n
    total_angle = 0.0
    last_ang = 0.0
    for k in range(max_steps):
        gx, gy = h_grad(case, np.array(x), np.array(y))
        norm = math.hypot(float(gx), float(gy))
        tx, ty = sgn * -float(gy) / norm, sgn * float(gx) / norm
        xp, yp = x + step * tx, y + step * ty
        for _ in range(3):
            f = float(h_eval(case, np.array(xp), np.array(yp))) - h
            gx, gy = h_grad(case, np.array(xp), np.array(yp))
            g2 = float(gx) ** 2 + float(gy) ** 2
            xp, yp = xp - f * float(gx) / g2, yp - f * float(gy) / g2
        ang = math.atan2(yp - cy, xp - cx)
        d = ang - last_ang
        while d <= -np.pi:
            d += 2 * np.pi
        while d > np.pi:
            d -= 2 * np.pi
        total_angle += d
        last_ang = ang
        x, y = xp, yp
        pts.append((x, y))
        if k > 10 and abs(total_angle) >= 2 * np.pi:
            break
    else:
        raise TraceError("marching tracer failed to close the oval")

    arr = np.asarray(pts)
    ang = np.arctan2(arr[:, 1] - cy, arr[:, 0] - cx)
    rad = np.hypot(arr[:, 0] - cx, arr[:, 1] - cy)
    ang = np.unwrap(ang)
    if not (np.all(np.diff(ang) > 0) or np.all(np.diff(ang) < 0)):
        raise TraceError("curve is not star-shaped around the center")
    if ang[0] > ang[-1]:
        ang, rad = ang[::-1], rad[::-1]
    theta = 2 * np.pi * np.arange(n) / n
    base = np.interp(np.mod(theta - ang[0], 2 * np.pi) + ang[0], ang, rad)
    ct, st = np.cos(theta), np.sin(theta)
    r = base
    for _ in range(60):
        xx, yy = cx + r * ct, cy + r * st
        f = h_eval(case, xx, yy) - h
        gx, gy = h_grad(case, xx, yy)
        gr = gx * ct + gy * st
        r = r - np.clip(f / gr, -0.25 * r, 0.25 * r)
    xx, yy = cx + r * ct, cy + r * st
    gx, gy = h_grad(case, xx, yy)
    ge = gx * ct + gy * st
    gperp = -gx * r * st + gy * r * ct
    rp = -gperp / ge
    dx, dy = rp * ct - r * st, rp * st + r * ct
    resid = float(np.max(np.abs(h_eval(case, xx, yy) - h)))
    pts2 = np.column_stack([np.append(xx, xx[0]), np.append(yy, yy[0])])
    return OvalSample(case=case, h=float(h), arc_param=np.append(theta, 2 * np.pi),
                      points=pts2, residual=resid, quad_error=np.nan,
                      x=xx, y=yy, dx=dx, dy=dy)
