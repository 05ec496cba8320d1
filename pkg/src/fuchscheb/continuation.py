"""Analytic continuation along complex paths and zero counting.

The solution traced by the periods — the one vanishing at t = 0 — is
continued by integrating the first-order system I' = (t B1 + B0) I / (t^2-t)
with adaptive error control, seeded by the Frobenius germ at the origin.
Zeros of a combination P x + Q y over the slit plane C minus [1, oo) are
counted by the argument principle along the boundary of {|t| < R} with the
slit neighborhood and a small disc at t = 1 removed; zeros on real
intervals by sign changes on refined grids, with the unbounded tail settled
through the expansion at infinity.  Counts are checked against the
dimension-plus-excess bounds of the perturbation spaces.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.ndimage import maximum_filter1d

from .catalog import FuchsianSystem, lambda_star
from .picard_fuchs import (
    SolutionGerm,
    _b_matrices,
    _require_unit,
    germ_eval,
    local_germ,
)
from .rational import peval
from .vspace import VSpaceElement, dim_vs

SEED_POINT = 0.1
PHASE_STEP_TARGET = math.pi / 8
ODE_RTOL = 1e-11


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class ComplexPath:
    """Piecewise-linear path in the slit plane.

    The path must keep ``min_singularity_distance`` from the singular
    points 0, 1 and from the slit [1, oo); setting ``cut_side`` to +1 or -1
    waives the slit clearance for points approaching from that half plane
    (the branch point t = 1 itself is still protected).  Crossing the slit
    is never allowed.
    """

    waypoints: tuple
    min_singularity_distance: float = 1e-3
    cut_side: int = 0


def _seg_point_dist(a: complex, b: complex, p: complex) -> float:
    d = b - a
    den = abs(d) ** 2
    s = 0.0 if den == 0 else min(1.0, max(0.0, ((p - a).conjugate() * d).real / den))
    return abs(a + s * d - p)


def _seg_cut_clearance(a: complex, b: complex):
    """(crosses, distance) of one segment against the slit [1, oo)."""
    ya, yb = a.imag, b.imag
    if ya == 0.0 and yb == 0.0:
        lo, hi = sorted((a.real, b.real))
        return hi >= 1.0, (1.0 - hi if hi < 1.0 else 0.0)
    if (ya > 0) != (yb > 0) and ya != 0 and yb != 0:
        xc = a.real + (b.real - a.real) * (-ya) / (yb - ya)
        if xc >= 1.0:
            return True, 0.0
    # no crossing: nearest approach is at an endpoint of the segment or at
    # the slit origin
    d = min(abs(ya), abs(yb)) if min(a.real, b.real) >= 1.0 else _seg_point_dist(
        a, b, 1.0 + 0.0j)
    cand = [d, _seg_point_dist(a, b, 1.0 + 0.0j)]
    for p in (a, b):
        cand.append(abs(p.imag) if p.real >= 1.0 else abs(p - 1.0))
    return False, min(cand)


def validate_path(path: ComplexPath) -> None:
    pts = [complex(w) for w in path.waypoints]
    if len(pts) < 2:
        raise ValueError("a path needs at least two waypoints")
    msd = float(path.min_singularity_distance)
    if msd <= 0:
        raise ValueError("min_singularity_distance must be positive")
    for a, b in zip(pts, pts[1:]):
        for sing in (0.0 + 0.0j, 1.0 + 0.0j):
            if _seg_point_dist(a, b, sing) < msd:
                raise ValueError(
                    f"path comes within {msd} of the singular point {sing}")
        crosses, dist = _seg_cut_clearance(a, b)
        if crosses:
            raise ValueError("path crosses the slit [1, oo)")
        if dist < msd and path.cut_side == 0:
            raise ValueError(f"path comes within {msd} of the slit [1, oo)")
        if dist < msd and path.cut_side != 0:
            for p in (a, b):
                if p.real >= 1.0 and p.imag * path.cut_side < 0:
                    raise ValueError(
                        "cut-side path strays to the wrong side of the slit")


# ---------------------------------------------------------------------------
# the continuation engine


_GERMS: dict = {}


def _germ_cached(sys: FuchsianSystem, base=0, direction=1) -> SolutionGerm:
    key = (sys.lam, sys.mu, sys.omega, base, direction)
    germ = _GERMS.get(key)
    if germ is None:
        germ = local_germ(sys, base if base != "inf" else math.inf,
                          trunc=48, direction=direction)
        _GERMS[key] = germ
    return germ


def _ode_rhs(sys: FuchsianSystem):
    lam, mu, _ = _require_unit(sys)
    b1, b0 = _b_matrices(sys, lam, mu)
    B1 = np.array([[complex(v) for v in row] for row in b1])
    B0 = np.array([[complex(v) for v in row] for row in b0])

    def deriv(t: complex, I: np.ndarray) -> np.ndarray:
        return (t * B1 + B0) @ I / (t * t - t)

    return deriv


def _integrate_segment(deriv, a: complex, b: complex, I0, rtol=ODE_RTOL,
                       dense=False):
    """Continue I along the straight segment a -> b; optionally keep the
    dense interpolant (callable on [0, 1])."""
    step = b - a

    def rhs(s, I):
        return step * deriv(a + s * step, I)

    scale = max(abs(I0[0]), abs(I0[1]), 1e-30)
    sol = solve_ivp(rhs, (0.0, 1.0), np.asarray(I0, dtype=complex),
                    method="DOP853", rtol=rtol, atol=1e-13 * scale,
                    dense_output=dense)
    if not sol.success:
        raise RuntimeError(
            f"continuation failed on segment {a} -> {b}: {sol.message}")
    return (sol.y[:, -1], sol.sol) if dense else (sol.y[:, -1], None)


def _integrate_arc(deriv, center: complex, radius: float, th0: float,
                   th1: float, I0, rtol=ODE_RTOL, dense=False):
    """Continue I along the circular arc center + radius e^{i theta}."""

    def rhs(th, I):
        t = center + radius * cmath.exp(1j * th)
        return 1j * radius * cmath.exp(1j * th) * deriv(t, I)

    scale = max(abs(I0[0]), abs(I0[1]), 1e-30)
    sol = solve_ivp(rhs, (th0, th1), np.asarray(I0, dtype=complex),
                    method="DOP853", rtol=rtol, atol=1e-13 * scale,
                    dense_output=dense)
    if not sol.success:
        raise RuntimeError(
            f"continuation failed on the arc about {center}: {sol.message}")
    return (sol.y[:, -1], sol.sol) if dense else (sol.y[:, -1], None)


def continue_solution(germ: SolutionGerm, path: ComplexPath,
                      coeffs=(1.0, 0.0), rtol: float = ODE_RTOL):
    """Values (x, y) at the path endpoint, continued from the germ at 0.

    The path must start inside the germ's convergence disc; the endpoint is
    reached by integrating the first-order system segment by segment.
    """
    if germ.base != 0:
        raise ValueError("continuation is seeded from the germ at the origin")
    validate_path(path)
    t0 = complex(path.waypoints[0])
    if abs(t0) >= 0.9 * germ.radius:
        raise ValueError(
            f"path starts at |t| = {abs(t0):.3g}, outside the germ's "
            f"validity radius {germ.radius:.3g}")
    sys = _unit_from_germ(germ)
    deriv = _ode_rhs(sys)
    I = np.array(germ_eval(germ, t0, coeffs=coeffs), dtype=complex)
    pts = [complex(w) for w in path.waypoints]
    for a, b in zip(pts, pts[1:]):
        if a == b:
            continue
        I, _ = _integrate_segment(deriv, a, b, I, rtol=rtol)
    return complex(I[0]), complex(I[1])


def _unit_from_germ(germ: SolutionGerm) -> FuchsianSystem:
    from .picard_fuchs import unit_system

    return unit_system(germ.lam, germ.mu, germ.omega)


# ---------------------------------------------------------------------------
# the slit-plane contour


@dataclass(frozen=True)
class ContourSpec:
    """Boundary data for the argument-principle count.

    R is the outer radius, r the radius of the removed disc at t = 1 and
    cut_offset the height at which the two slit sides are traversed.
    """

    R: float = 50.0
    r: float = 1e-2
    cut_offset: float = 1e-4
    samples_per_segment: int = 256

    def __post_init__(self):
        if not self.R > 2:
            raise ValueError("outer radius must exceed 2")
        if not 0 < self.r < 0.5:
            raise ValueError("inner radius must lie in (0, 1/2)")
        if self.cut_offset > self.r / 10:
            raise ValueError("cut offset must not exceed r/10")
        if self.samples_per_segment < 16:
            raise ValueError("need at least 16 samples per segment")


def _contour_pieces(spec: ContourSpec):
    """The four boundary pieces, positively oriented, as parametrizations.

    Each entry is (name, kind, data): kind "line" with endpoints or "arc"
    with (center, radius, theta0, theta1).  The traversal starts just above
    the slit near t = 1 and keeps the region on the left.
    """
    d = spec.cut_offset
    xa = 1.0 + math.sqrt(spec.r**2 - d * d)
    xb = math.sqrt(spec.R**2 - d * d)
    phi = math.asin(d / spec.R)
    th = math.asin(d / spec.r)
    return [
        ("cut_upper", "line", (complex(xa, d), complex(xb, d))),
        ("outer_circle", "arc", (0.0 + 0.0j, spec.R, phi, 2 * math.pi - phi)),
        ("cut_lower", "line", (complex(xb, -d), complex(xa, -d))),
        ("inner_circle", "arc", (1.0 + 0.0j, spec.r, -th, th - 2 * math.pi)),
    ]


def _piece_points(kind, data, ss):
    if kind == "line":
        a, b = data
        return a + ss * (b - a)
    center, radius, th0, th1 = data
    return center + radius * np.exp(1j * (th0 + ss * (th1 - th0)))


def _approach_route(spec: ContourSpec):
    """Waypoints from the seed point to the contour start."""
    d = spec.cut_offset
    xa = 1.0 + math.sqrt(spec.r**2 - d * d)
    lift = 0.5
    return [complex(SEED_POINT, 0.0), complex(SEED_POINT, lift),
            complex(xa, lift), complex(xa, d)]


def _phase_increment(values: np.ndarray):
    """(total increment, max step) of the unwrapped phase along values."""
    ph = np.unwrap(np.angle(values))
    steps = np.abs(np.diff(ph))
    return float(ph[-1] - ph[0]), float(steps.max() if len(steps) else 0.0)


def curve_winding(values):
    """(turns, max phase step) of sampled values along a closed curve.

    The sampling must close up (first value repeated last) and resolve the
    phase: steps of pi or more alias the winding.  Feeding an analytic
    function sampled on a circle gives its zero count inside; this is the
    arithmetic core the contour counter rests on.
    """
    values = np.asarray(values, dtype=complex)
    if len(values) < 8:
        raise ValueError("too few samples to wind")
    if np.min(np.abs(values)) == 0.0:
        raise ValueError("zero value on the curve")
    total, step = _phase_increment(values)
    if step >= math.pi:
        raise ValueError("phase step >= pi: winding undersampled")
    return total / (2 * math.pi), step


# ---------------------------------------------------------------------------
# argument-principle counting


@dataclass(frozen=True)
class ZeroCountReport:
    """Outcome of one argument-principle count over the slit plane."""

    increments: tuple
    total_winding: float
    zero_count: int
    bound: int
    max_phase_step: float
    stable: bool
    passed: bool
    R: float
    r: float
    diagnostics: dict | None = None


def _element_values(elem: VSpaceElement, ts: np.ndarray, xs: np.ndarray,
                    ys: np.ndarray) -> np.ndarray:
    P = np.array([complex(c) for c in elem.P]) if elem.P else np.zeros(1)
    Q = np.array([complex(c) for c in elem.Q]) if elem.Q else np.zeros(1)
    return np.polyval(P[::-1], ts) * xs + np.polyval(Q[::-1], ts) * ys


_TRACES: dict = {}


def _solution_trace(sys: FuchsianSystem, spec: ContourSpec, rtol=ODE_RTOL):
    """Dense (x, y) interpolants along the closed contour, cached.

    The continuation around a contour does not depend on the element being
    counted, so sweeps over many (P, Q) reuse one trace per system and
    contour.  Returns (pieces, closure_defect) with pieces entries
    (name, kind, data, dense interpolant).
    """
    key = (sys.lam, sys.mu, sys.omega, spec.R, spec.r, spec.cut_offset, rtol)
    hit = _TRACES.get(key)
    if hit is not None:
        return hit
    deriv = _ode_rhs(sys)
    germ = _germ_cached(sys)
    I = np.array(germ_eval(germ, SEED_POINT), dtype=complex)
    route = _approach_route(spec)
    for a, b in zip(route, route[1:]):
        I, _ = _integrate_segment(deriv, a, b, I, rtol=rtol)
    start = I.copy()

    pieces = []
    for name, kind, data in _contour_pieces(spec):
        if kind == "line":
            I, dense = _integrate_segment(deriv, *data, I, rtol=rtol,
                                          dense=True)
        else:
            center, radius, th0, th1 = data
            I, dense = _integrate_arc(deriv, center, radius, th0, th1, I,
                                      rtol=rtol, dense=True)
        pieces.append((name, kind, data, dense))

    closure = float(np.max(np.abs(I - start)) /
                    max(np.max(np.abs(start)), 1e-300))
    _TRACES[key] = (pieces, closure)
    return pieces, closure


def _contour_trace(elem: VSpaceElement, spec: ContourSpec, rtol=ODE_RTOL):
    """I and (x, y) sampled along the closed contour, per piece.

    Returns (pieces, closure_defect) where each piece is
    (name, t samples, I values, x values, y values); sampling within a
    piece is refined on its dense interpolant until consecutive phase
    steps drop below PHASE_STEP_TARGET.
    """
    solution, closure = _solution_trace(elem.system, spec, rtol=rtol)
    pieces = []
    for name, kind, data, dense in solution:
        n = spec.samples_per_segment
        for _ in range(8):
            ss = np.linspace(0.0, 1.0, n)
            if kind == "arc":
                th0, th1 = data[2], data[3]
                vals = dense(th0 + ss * (th1 - th0))
            else:
                vals = dense(ss)
            ts = _piece_points(kind, data, ss)
            xs, ys = vals[0], vals[1]
            Iv = _element_values(elem, ts, xs, ys)
            _, step = _phase_increment(Iv)
            if step < PHASE_STEP_TARGET:
                break
            n *= 2
        pieces.append((name, ts, Iv, xs, ys))
    return pieces, closure


def _winding_bound(elem: VSpaceElement) -> int:
    lam = min(elem.system.lam, elem.system.mu)
    return dim_vs(elem.system.lam, elem.system.mu, elem.s) + \
        math.floor(lambda_star(lam))


def count_zeros_argument(elem: VSpaceElement, contour: ContourSpec = None,
                         stability_check: bool = True,
                         with_f_diagnostics: bool = False,
                         keep_trace: bool = False) -> ZeroCountReport:
    """Count the zeros of P x + Q y over the slit plane by winding.

    The count is run on the given contour and, for the stability flag,
    repeated with the outer radius doubled and the inner radius halved.
    Zeros landing on the contour trigger a deterministic retry schedule
    with slightly perturbed radii; three failures raise.
    """
    if contour is None:
        contour = ContourSpec()
    if not any(elem.P) and not any(elem.Q):
        raise ValueError("cannot count zeros of the zero combination")
    if elem.system.lam.denominator == 1 or elem.system.mu.denominator == 1:
        raise ValueError("argument-principle counting needs non-integer "
                         "exponents (integer case is polynomial)")

    report = None
    spec = contour
    for attempt in range(3):
        pieces, closure = _contour_trace(elem, spec)
        # a zero sitting on the contour shows as a dip of |I| far below its
        # neighboring samples (global scales are useless: |I| legitimately
        # spans many decades along a graded contour)
        min_dip = 1.0
        increments, max_step = [], 0.0
        for name, ts, Iv, xs, ys in pieces:
            m = np.abs(Iv)
            ref = maximum_filter1d(m, size=17, mode="nearest")
            min_dip = min(min_dip, float(np.min(m / ref)))
            inc, step = _phase_increment(Iv)
            increments.append(inc)
            max_step = max(max_step, step)
        total = float(sum(increments))
        count = round(total / (2 * math.pi))
        defect = abs(total / (2 * math.pi) - count)
        if min_dip > 1e-9 and defect < 1e-3 and max_step < math.pi:
            diagnostics = {
                "closure_defect": closure,
                "min_dip_on_contour": min_dip,
                "winding_defect": defect,
                "attempts": attempt + 1,
            }
            if with_f_diagnostics:
                wy = sum(_phase_increment(p[4])[0] for p in pieces)
                wf = sum(_phase_increment(p[2] / p[4])[0] for p in pieces)
                diagnostics["y_zero_count"] = round(wy / (2 * math.pi))
                diagnostics["f_winding_turns"] = wf / (2 * math.pi)
                diagnostics["decomposition_defect"] = abs(
                    (wf + wy - total) / (2 * math.pi))
            if keep_trace:
                diagnostics["trace"] = [
                    (name, ts, Iv) for name, ts, Iv, _, _ in pieces]
            report = (increments, total, count, max_step, diagnostics)
            break
        spec = replace(spec, R=spec.R * (1 + 1e-3))
    if report is None:
        raise RuntimeError(
            "argument-principle count failed three times (zero on or near "
            "the contour, or unresolved phase sampling)")

    increments, total, count, max_step, diagnostics = report
    if count < 0:
        raise RuntimeError(f"negative winding {count}: continuation defect")
    stable = True
    if stability_check:
        wide = replace(spec, R=2 * spec.R, r=spec.r / 2,
                       cut_offset=spec.cut_offset / 2)
        twin = count_zeros_argument(elem, wide, stability_check=False,
                                    with_f_diagnostics=False)
        stable = twin.zero_count == count
        diagnostics["stability_count"] = twin.zero_count
    bound = _winding_bound(elem)
    return ZeroCountReport(
        increments=tuple(increments), total_winding=total, zero_count=count,
        bound=bound, max_phase_step=max_step, stable=stable,
        passed=(count <= bound), R=spec.R, r=spec.r,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# real-interval counting


_AXES: dict = {}


def _real_axis_evaluator(sys: FuchsianSystem, lo: float, hi: float,
                         rtol=ODE_RTOL):
    """Callable t -> (x, y) on [lo, hi] subset of (-oo, 1).

    Near the origin the germ is evaluated directly; beyond a fixed handover
    point the dense interpolant of one left and one right integration is
    used (cached per system and range).  The handover points stay well
    inside the germ's disc.
    """
    key = (sys.lam, sys.mu, sys.omega, lo, hi, rtol)
    hit = _AXES.get(key)
    if hit is not None:
        return hit
    germ = _germ_cached(sys)
    deriv = _ode_rhs(sys)
    hand = 0.4 * min(germ.radius, 1.0)
    dense_r = dense_l = None
    if hi > hand:
        I = np.array(germ_eval(germ, hand), dtype=complex)
        _, dense_r = _integrate_segment(deriv, complex(hand), complex(hi), I,
                                        rtol=rtol, dense=True)
    if lo < -hand:
        I = np.array(germ_eval(germ, -hand), dtype=complex)
        _, dense_l = _integrate_segment(deriv, complex(-hand), complex(lo), I,
                                        rtol=rtol, dense=True)

    def at(t: float):
        if t > hand:
            v = dense_r((t - hand) / (hi - hand))
        elif t < -hand:
            v = dense_l((t + hand) / (lo + hand))
        else:
            if t == 0.0:
                return 0.0, 0.0
            v = germ_eval(germ, t)
        return float(v[0].real), float(v[1].real)

    _AXES[key] = at
    return at


def _tail_start(elem: VSpaceElement) -> float:
    germ = _germ_cached(elem.system, base="inf", direction=-1)
    deg = max(len(elem.P), len(elem.Q))
    return -max(12.0, 3.0 * germ.radius, 2.0 * deg)


def connection_fit(elem: VSpaceElement, T: float | None = None,
                   npts: int = 6):
    """Expansion coefficients of the solution over the frames at -infinity.

    The solution vector is matched against the two real frames on the
    negative axis by least squares at npts points t <= T < 0; returns
    (a, b, residual) with residual the worst relative misfit at held-out
    midpoints.  Quantifies how the continued solution enters its asymptotic
    regime, and underpins the unbounded-interval tail argument.
    """
    sys = elem.system
    if T is None:
        T = _tail_start(elem)
    if T >= 0:
        raise ValueError("the connection fit runs on the negative axis")
    germ_inf = _germ_cached(sys, base="inf", direction=-1)
    at = _real_axis_evaluator(sys, 2.0 * T, -1e-3)
    ts = np.linspace(T, 2.0 * T, 2 * npts)
    rows, rhs = [], []
    for t in ts[::2]:
        f0 = germ_eval(germ_inf, t, coeffs=(1.0, 0.0))
        f1 = germ_eval(germ_inf, t, coeffs=(0.0, 1.0))
        x, y = at(float(t))
        rows += [[f0[0].real, f1[0].real], [f0[1].real, f1[1].real]]
        rhs += [x, y]
    (a, b), *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    worst = 0.0
    for t in ts[1::2]:
        f0 = germ_eval(germ_inf, t, coeffs=(1.0, 0.0))
        f1 = germ_eval(germ_inf, t, coeffs=(0.0, 1.0))
        x, y = at(float(t))
        for got, fit in ((x, a * f0[0].real + b * f1[0].real),
                         (y, a * f0[1].real + b * f1[1].real)):
            scale = max(abs(got), abs(fit), 1e-300)
            worst = max(worst, abs(got - fit) / scale)
    return float(a), float(b), float(worst)


def _tail_sign_changes(elem: VSpaceElement, ca: float, cb: float,
                       edge: float) -> int:
    """Sign changes of P x + Q y on (-oo, edge].

    Counted on the frame expansion with fitted coefficients, scanned on a
    geometric grid out to where the top term dominates the summed
    magnitudes of every other term by a factor of two — past that point
    the combination cannot vanish, so the count is complete.
    """
    germ_inf = _germ_cached(elem.system, base="inf", direction=-1)

    def val(t):
        f0 = germ_eval(germ_inf, t, coeffs=(ca, cb))
        return (peval([float(c) for c in elem.P], t) * f0[0].real
                + peval([float(c) for c in elem.Q], t) * f0[1].real)

    far = edge
    for _ in range(60):
        far *= 2.0
        if _top_dominates(elem, ca, cb, germ_inf, far):
            break
    else:
        raise RuntimeError("tail dominance not reached; interval unresolved")
    grid = -np.geomspace(-edge, -far, 400)
    vals = np.array([val(float(t)) for t in grid])
    return int(np.count_nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))


def _frame_term_magnitudes(frame, comp: int, shift: int, u: float):
    """Magnitudes |c| |u|^e of each expansion term of one frame component,
    the power shifted by the cofactor degree; log terms carry |log u|."""
    for m, coefs in enumerate(frame.series):
        c = complex(coefs[comp])
        if c != 0:
            yield abs(c) * abs(u) ** (float(frame.exponent) - m + shift)
    if frame.log_gamma not in (None, 0):
        g = abs(float(frame.log_gamma)) * abs(math.log(abs(u)))
        for m, coefs in enumerate(frame.log_series):
            c = complex(coefs[comp])
            if c != 0:
                yield g * abs(c) * abs(u) ** (
                    float(frame.log_exponent) - m + shift)


def _top_dominates(elem, ca, cb, germ_inf, t: float) -> bool:
    """Top magnitude of the termwise expansion of I at t beats twice the rest."""
    terms = []
    u = germ_inf.direction * t
    for cf, frame in zip((ca, cb), germ_inf.frames):
        if cf == 0:
            continue
        for poly, comp in ((elem.P, 0), (elem.Q, 1)):
            for k, pk in enumerate(poly):
                if pk == 0:
                    continue
                w = abs(cf * float(pk))
                terms.extend(w * m for m in
                             _frame_term_magnitudes(frame, comp, k, u))
    if not terms:
        return True
    terms.sort(reverse=True)
    return terms[0] > 2.0 * sum(terms[1:])


def _grid_count(val, lo: float, hi: float, resolution: float,
                skip_origin: bool):
    """Stabilized sign-change count of val on [lo, hi].

    The grid is doubled until the count repeats; dips of |val| below the
    local scale without a sign change are polished locally and either
    resolved into a crossing pair, flagged as suspected even multiplicity,
    or raised as an unresolved cluster.
    """
    n = 512
    prev = None
    for _ in range(6):
        ts = np.linspace(lo, hi, n)
        if skip_origin:
            # the combination vanishes identically at the origin; step over
            ts = ts[np.abs(ts) > 1e-9]
        vals = np.array([val(t) for t in ts])
        signs = np.sign(vals)
        count = int(np.count_nonzero(signs[:-1] * signs[1:] < 0))
        if skip_origin and lo < 0.0 < hi:
            if val(-1e-7 * max(1.0, abs(lo))) * val(1e-7) < 0:
                count += 1  # crossing hidden by the excluded origin
        if prev is not None and count == prev:
            break
        prev = count
        n *= 2

    scale = float(np.max(np.abs(vals)))
    suspected = []
    mags = np.abs(vals)
    for i in range(1, len(ts) - 1):
        if mags[i] < 1e-6 * scale and mags[i] <= mags[i - 1] \
                and mags[i] <= mags[i + 1] and signs[i - 1] * signs[i + 1] > 0:
            fine = np.linspace(ts[i - 1], ts[i + 1], 200)
            fv = np.array([val(t) for t in fine])
            if np.any(np.sign(fv[:-1]) * np.sign(fv[1:]) < 0):
                count += 2  # a pair of near-tangent crossings
            elif np.min(np.abs(fv)) < resolution * scale:
                raise RuntimeError(
                    f"unresolved zero cluster near t = {ts[i]:.6g}")
            elif np.min(np.abs(fv)) < 1e-8 * scale:
                p = float(fine[np.argmin(np.abs(fv))])
                if not suspected or p - suspected[-1] > 2 * (ts[1] - ts[0]):
                    suspected.append(p)
    return count, ts, vals, suspected


def count_zeros_interval(elem, interval, resolution=1e-10,
                         details: bool = False):
    """Sign-change zeros of P x + Q y on a real interval left of t = 1.

    The endpoints must clear the singular points 0 and 1 by 1e-6; an
    unbounded left end is handled by the expansion at infinity (the count
    is finite once the top term dominates).  Dips of |I| below the local
    scale without a sign change are polished and flagged as suspected even
    multiplicity; clusters that stay unresolved below ``resolution`` raise.
    A plain callable may be passed instead of an element (synthetic
    probes); it is scanned verbatim on its finite interval.
    """
    a, b = interval
    if a >= b:
        raise ValueError("empty interval")

    if not isinstance(elem, VSpaceElement) and callable(elem):
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("a synthetic probe needs a finite interval")
        count, ts, vals, suspected = _grid_count(elem, a, b, resolution,
                                                 skip_origin=False)
        if details:
            return count, {"grid": ts, "values": vals,
                           "suspected_multiplicity": suspected,
                           "tail_start": None}
        return count

    if not b < 1.0 - 1e-6:
        raise ValueError("interval must stay left of the singular point 1")
    for p in (a, b):
        if math.isfinite(p) and min(abs(p), abs(p - 1.0)) < 1e-6:
            raise ValueError("interval endpoint too close to a singular point")

    tail_count = 0
    lo = a
    if a == -math.inf:
        lo = _tail_start(elem)
        ca, cb, res = connection_fit(elem)
        if res > 1e-6:
            raise RuntimeError(
                f"connection fit residual {res:.2e}: asymptotic regime not "
                "reached, cannot settle the unbounded tail")
        tail_count = _tail_sign_changes(elem, ca, cb, lo)

    at = _real_axis_evaluator(elem.system, min(lo, -1e-3), max(b, 1e-3))
    Pf = [float(c) for c in elem.P]
    Qf = [float(c) for c in elem.Q]

    def val(t):
        x, y = at(float(t))
        return peval(Pf, float(t)) * x + peval(Qf, float(t)) * y

    count, ts, vals, suspected = _grid_count(val, lo, b, resolution,
                                             skip_origin=True)
    count += tail_count
    if details:
        return count, {"grid": ts, "values": vals,
                       "suspected_multiplicity": suspected,
                       "tail_start": lo if a == -math.inf else None,
                       "tail_count": tail_count}
    return count


# ---------------------------------------------------------------------------
# bound bookkeeping


@dataclass(frozen=True)
class BoundVerdict:
    """Zero-count verdicts against one perturbation space.

    ``domain_bound`` applies to counts over the slit plane (dimension plus
    excess minus one); ``sigma_bound`` to counts on the open real interval
    between the critical values, where the forced zero at the center value
    is already spent.
    """

    case_id: str
    n: int
    zero_count: int
    domain_bound: int
    sigma_bound: int
    ok: bool


def check_bound(report: ZeroCountReport, space) -> BoundVerdict:
    """Judge an argument-principle count against the tabulated bounds."""
    domain = space.dim + space.accuracy - 1
    sigma = space.dim - 1 + space.sigma_accuracy
    return BoundVerdict(
        case_id=space.case_id, n=space.n, zero_count=report.zero_count,
        domain_bound=domain, sigma_bound=sigma,
        ok=bool(report.zero_count <= domain),
    )


# ---------------------------------------------------------------------------
# auxiliary certificates


def _pval(coeffs, t: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * t + complex(c)
    return acc


def conjugation_defect(elem: VSpaceElement, t: complex) -> float:
    """Relative defect of I(conj t) against conj I(t) for one off-axis point.

    Both continuations run along mirrored paths; real coefficients make the
    two values exact conjugates, so the defect measures continuation error.
    """
    t = complex(t)
    if t.imag == 0:
        raise ValueError("pick a point off the real axis")
    germ = _germ_cached(elem.system)
    up = ComplexPath((SEED_POINT, complex(SEED_POINT, t.imag), t))
    dn = ComplexPath((SEED_POINT, complex(SEED_POINT, -t.imag), t.conjugate()))
    xu, yu = continue_solution(germ, up)
    xd, yd = continue_solution(germ, dn)
    Iu = _pval(elem.P, t) * xu + _pval(elem.Q, t) * yu
    Id = _pval(elem.P, t.conjugate()) * xd + _pval(elem.Q, t.conjugate()) * yd
    return abs(Id - Iu.conjugate()) / max(abs(Iu), 1e-300)


def cut_side_trace(sys: FuchsianSystem, t_max: float, n: int = 1000,
                   side: int = 1, offset: float = 1e-4):
    """(t, x, y) arrays along one side of the slit from 1+ to t_max.

    The line at height side*offset is reached over the top (or bottom) and
    traversed with a dense interpolant; the imaginary parts encode the
    jump across the slit.
    """
    if t_max <= 1.5:
        raise ValueError("trace needs t_max > 1.5")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    germ = _germ_cached(sys)
    deriv = _ode_rhs(sys)
    d = side * offset
    x0 = 1.0 + max(10 * offset, 1e-2)
    route = [complex(SEED_POINT, 0.0), complex(SEED_POINT, side * 0.5),
             complex(x0, side * 0.5), complex(x0, d)]
    I = np.array(germ_eval(germ, route[0]), dtype=complex)
    for a, b in zip(route, route[1:]):
        I, _ = _integrate_segment(deriv, a, b, I)
    _, dense = _integrate_segment(deriv, complex(x0, d), complex(t_max, d), I,
                                  dense=True)
    ss = np.linspace(0.0, 1.0, n)
    ts = x0 + ss * (t_max - x0)
    vals = dense(ss)
    return ts, vals[0], vals[1]


def saddle_limit(sys: FuchsianSystem, eps=(1e-2, 1e-3, 1e-4)):
    """x(1 - eps) for shrinking eps, with a stabilization estimate.

    Returns (values, drift): the limit of the first component at the
    interior critical value exists and is nonzero; drift compares the last
    two approximants relative to the last value.
    """
    germ = _germ_cached(sys)
    deriv = _ode_rhs(sys)
    I = np.array(germ_eval(germ, SEED_POINT), dtype=complex)
    vals = []
    t = SEED_POINT
    for e in sorted(eps, reverse=True):
        I, _ = _integrate_segment(deriv, complex(t), complex(1.0 - e), I)
        t = 1.0 - e
        vals.append(complex(I[0]))
    drift = abs(vals[-1] - vals[-2]) / max(abs(vals[-1]), 1e-300)
    return vals, float(drift)


@dataclass(frozen=True)
class GrowthCheck:
    """Uniform growth certificate |I| <= C |t|^s at desk scale."""

    s: float
    C: float
    ratio_at_2R: float
    ok: bool


def growth_certificate(elem: VSpaceElement, R: float = 50.0, rays: int = 64,
                       slack: float = 1.05, s=None) -> GrowthCheck:
    """Fit C = max |I| / R^s over rays at |t| = R and validate at 2R.

    The constant is fitted on the circle of radius R (avoiding the slit by
    the default contour offset) and must not be exceeded by more than
    ``slack`` on the circle of radius 2R.  ``s`` defaults to the element's
    space exponent; pass the raw cofactor growth instead when the element
    stands for a bracket with a negative prefactor power split off.
    """
    s = float(elem.s if s is None else s)
    vals = {}
    for radius in (R, 2 * R):
        spec = ContourSpec(R=radius, samples_per_segment=max(64, 2 * rays))
        pieces, _ = _contour_trace(elem, spec)
        name, ts, Iv, xs, ys = pieces[1]
        vals[radius] = np.max(np.abs(Iv))
    C = float(vals[R] / R**s)
    ratio = float(vals[2 * R] / (C * (2 * R) ** s))
    return GrowthCheck(s=s, C=C, ratio_at_2R=ratio, ok=bool(ratio <= slack))


# ---------------------------------------------------------------------------
# reporting


def write_zero_counts_csv(path, rows) -> None:
    """CSV dump of sweep rows: case, n, trial, count, bound, pass, R, r,
    stable."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case", "n", "trial", "zero_count", "bound", "pass",
                    "R", "r", "stable"])
        for row in rows:
            w.writerow([row["case"], row["n"], row["trial"],
                        row["zero_count"], row["bound"], int(row["pass"]),
                        repr(float(row["R"])), repr(float(row["r"])),
                        int(row["stable"])])


def save_contour_plot(report: ZeroCountReport, path) -> None:
    """SVG of the contour phases; needs a report built with keep_trace."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    trace = (report.diagnostics or {}).get("trace")
    if not trace:
        raise ValueError("report carries no trace; rebuild with keep_trace")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    off = 0.0
    for name, ts, Iv in trace:
        ph = np.unwrap(np.angle(Iv))
        ax1.plot(np.linspace(off, off + 1, len(ph)), ph / (2 * math.pi),
                 label=name)
        ax2.plot(ts.real, ts.imag, lw=1)
        off += 1
    ax1.set_xlabel("contour position (pieces)")
    ax1.set_ylabel("arg I / 2pi")
    ax1.legend(fontsize=7)
    ax2.set_xlabel("Re t")
    ax2.set_ylabel("Im t")
    ax2.set_title(f"count {report.zero_count}, bound {report.bound}")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def save_interval_plot(ts, vals, path, title: str = "") -> None:
    """SVG graph of I on a real interval with its zero crossings marked."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(ts, vals, lw=1)
    ax.axhline(0.0, color="k", lw=0.5)
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    ax.plot(ts[idx], np.zeros(len(idx)), "rx", ms=6)
    ax.set_xlabel("t")
    ax.set_ylabel("I(t)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
