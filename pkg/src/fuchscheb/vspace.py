"""Growth-graded spaces of period combinations and perturbation tables.

A combination I = P(t) x(t) + Q(t) y(t) of the unit-form solutions with
polynomial cofactors either stays bounded by C|t|^s on the cut plane or it
does not; V_s collects the combinations that do.  The classification is
purely symbolic: expand the generic solution at infinity in the two frames
(plus the log term when the exponent gap is an integer) and read off the
leading exponents after exact cancellations.  A term t^e is admissible for
e <= s, a term t^e log t only for e < s -- the strict inequality is what
makes V_{1/2} empty for exponents (3/2, 1/2) and removes one ladder element
whenever the gap and s - 1/2 are both integers.

The module provides the closed dimension formula, a constructive basis
(monomials t^k x, t^l y and, for gaps above one, the corrected combinations
z_m = t z_{m-1} - alpha_m x), two independence oracles (floating point
evaluation and exact rational coefficient rank), and the tables of
polynomial-perturbation spaces attached to every catalogued system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .catalog import (
    CASE_IDS,
    FuchsianSystem,
    HamiltonianCase,
    get_case,
    lambda_star,
    to_normal_form,
)
from .picard_fuchs import SolutionGerm, germ_eval, local_germ, unit_system
from .rational import (
    F,
    Poly,
    fraction_str,
    minv,
    padd,
    pcompose_affine,
    pdeg,
    peval,
    pscale,
    ptrim,
)

__all__ = [
    "GrowthProfile",
    "VSpaceElement",
    "LadderElement",
    "ApplicationSpace",
    "dim_vs",
    "dim_polynomial_class",
    "growth_profile",
    "growth_exponent",
    "in_vspace",
    "ladder",
    "basis",
    "evaluation_rank",
    "coefficient_rank",
    "to_unit_cofactors",
    "application_space",
    "application_table",
]


# ---------------------------------------------------------------------------
# dimension formula


def dim_vs(lam, mu, s) -> int:
    """Dimension of V_s for non-integer exponents lam + mu = 2.

    The formula is floor(s - lam) + floor(s - mu) + 2, except that the
    resonant alignment (lam - mu and s - 1/2 both integers) gives 2s - 1,
    and V_s is empty in the single boundary case s = min(lam, mu) = 1/2.
    """
    lam, mu, s = F(lam), F(mu), F(s)
    if lam + mu != 2:
        raise ValueError("exponents must satisfy lam + mu = 2")
    if lam.denominator == 1:
        raise ValueError(
            "integer exponents give a plain polynomial class; "
            "use dim_polynomial_class"
        )
    if s < lambda_star(lam):
        raise ValueError("s below the minimal growth exponent lambda*")
    hi, lo = max(lam, mu), min(lam, mu)
    if s == lo == F(1, 2):
        return 0
    if (hi - lo).denominator == 1 and (s - F(1, 2)).denominator == 1:
        return int(2 * s - 1)
    return math.floor(s - hi) + math.floor(s - lo) + 2


def dim_polynomial_class(s) -> int:
    """Dimension for integer exponents: polynomials of degree <= floor(s)
    vanishing at both critical values."""
    return max(math.floor(F(s)) - 1, 0)


# ---------------------------------------------------------------------------
# symbolic growth classification


@dataclass(frozen=True)
class GrowthProfile:
    """Leading behaviour of P x + Q y at infinity, per expansion channel.

    ``exponent`` is the largest exponent carrying a nonzero coefficient in
    any channel; ``log_at_top`` records whether a log term attains it.  The
    per-channel tops (None when the channel is empty) refer to the two
    power frames and the log part of the resonant frame.
    """

    exponent: Fraction
    log_at_top: bool
    top_small: Fraction | None
    top_big: Fraction | None
    top_log: Fraction | None

    def admits(self, s) -> bool:
        """Membership of the combination in V_s."""
        s = F(s)
        if self.exponent < s:
            return True
        return self.exponent == s and not self.log_at_top


def _germ_channels(germ: SolutionGerm):
    """(rho, series) per channel name, from an infinity germ."""
    fs, fb = germ.frames
    chans = {"small": (fs.exponent, fs.series), "big": (fb.exponent, fb.series)}
    if fb.log_gamma is not None:
        scaled = tuple(
            (fb.log_gamma * cx, fb.log_gamma * cy) for cx, cy in fb.log_series
        )
        chans["log"] = (fb.log_exponent, scaled)
    return chans


def _channel_top(P: Poly, Q: Poly, rho: Fraction, series, trunc: int):
    """Leading exponent of the channel expansion of P x + Q y, or None.

    Returns "unresolved" when every coefficient the truncation determines
    cancels; the caller then deepens the germ.
    """
    deg = max(pdeg(P), pdeg(Q))
    acc: dict[Fraction, Fraction] = {}
    for poly, comp in ((P, 0), (Q, 1)):
        for k, pk in enumerate(poly):
            if pk == 0:
                continue
            for m, pair in enumerate(series):
                c = pair[comp]
                if c != 0:
                    e = rho - m + k
                    acc[e] = acc.get(e, F(0)) + pk * c
    # coefficients are only fully determined above rho + deg - trunc
    floor_excl = rho + deg - trunc
    tops = sorted((e for e in acc if e > floor_excl), reverse=True)
    for e in tops:
        if acc[e] != 0:
            return e
    return "unresolved" if acc else None


def growth_profile(P, Q, germ: SolutionGerm) -> GrowthProfile:
    """Exact leading-exponent profile of P x + Q y from an infinity germ.

    P multiplies the first solution component, Q the second.  Raises
    ValueError for the zero combination.
    """
    P = ptrim([F(c) for c in P])
    Q = ptrim([F(c) for c in Q])
    if not P and not Q:
        raise ValueError("zero combination has no growth exponent")
    if germ.base != math.inf or germ.direction != 1:
        raise ValueError("growth classification needs the germ at +infinity")

    for attempt in range(2):
        tops = {}
        unresolved = False
        for name, (rho, series) in _germ_channels(germ).items():
            top = _channel_top(P, Q, rho, series, germ.trunc_order)
            if top == "unresolved":
                unresolved = True
                break
            tops[name] = top
        if not unresolved:
            break
        if attempt == 1:
            raise ArithmeticError(
                "expansion cancels beyond the available truncation"
            )
        sys = unit_system(germ.lam, germ.mu, germ.omega)
        deg = max(pdeg(P), pdeg(Q))
        germ = local_germ(sys, math.inf, trunc=2 * germ.trunc_order + 2 * deg)

    cands = [t for t in tops.values() if t is not None]
    if not cands:
        raise ArithmeticError("all channels vanished for a nonzero combination")
    e = max(cands)
    return GrowthProfile(
        exponent=e,
        log_at_top=tops.get("log") == e,
        top_small=tops.get("small"),
        top_big=tops.get("big"),
        top_log=tops.get("log"),
    )


def growth_exponent(P, Q, sys: FuchsianSystem) -> Fraction:
    """Smallest admissible growth exponent of P x + Q y for a unit system.

    When the top term carries a logarithm the returned value is the
    infimum: membership in V_s then needs s strictly above it.
    """
    deg = max(pdeg(ptrim([F(c) for c in P])), pdeg(ptrim([F(c) for c in Q])), 0)
    germ = local_germ(sys, math.inf, trunc=max(26, deg + 26))
    return growth_profile(P, Q, germ).exponent


def in_vspace(P, Q, s, germ: SolutionGerm) -> bool:
    return growth_profile(P, Q, germ).admits(s)


# ---------------------------------------------------------------------------
# constructive basis


@dataclass(frozen=True)
class VSpaceElement:
    """One basis combination P x + Q y of V_s (unit coordinates)."""

    P: tuple
    Q: tuple
    system: FuchsianSystem
    s: Fraction
    basis_tag: str | None = None


@dataclass(frozen=True)
class LadderElement:
    """The corrected combination z_m = t z_{m-1} - alpha_m x.

    ``alphas`` lists alpha_1 .. alpha_m; each is fixed so that the
    coefficient at t^{lam} (the larger exponent) in z_m vanishes.  P and Q
    are the resulting polynomial cofactors of the two components.
    """

    m: int
    alphas: tuple
    P: tuple
    Q: tuple


def ladder(germ: SolutionGerm, m_max: int) -> list[LadderElement]:
    """The sequence z_1 .. z_{m_max} for a germ with exponent gap above one."""
    if germ.base != math.inf or germ.direction != 1:
        raise ValueError("ladder elements are built from the germ at +infinity")
    lam, mu = germ.lam, germ.mu
    if abs(lam - mu) <= 1:
        raise ValueError("ladder requires an exponent gap above one")
    big = 0 if lam > mu else 1
    hi = max(lam, mu)
    chans = _germ_channels(germ)
    rho_b, series_b = chans["big"]

    def big_coeff(P, Q, e):
        # coefficient of t^e in the big-frame channel of P x + Q y
        val = F(0)
        for poly, comp in ((P, 0), (Q, 1)):
            for k, pk in enumerate(poly):
                m = int(rho_b - e + k) if (rho_b - e + k).denominator == 1 else None
                if m is not None and 0 <= m < len(series_b):
                    val += pk * series_b[m][comp]
        return val

    xhat = ([F(1)], []) if big == 0 else ([], [F(1)])
    # z_0 = the small component; each step multiplies by t and corrects
    P, Q = ([], [F(0), F(1)]) if big == 0 else ([F(0), F(1)], [])
    out = []
    alphas: list[Fraction] = []
    for m in range(1, m_max + 1):
        if m > 1:
            P, Q = [F(0)] + list(P), [F(0)] + list(Q)
        alpha = big_coeff(P, Q, hi) / big_coeff(*xhat, hi)
        if big == 0:
            P = ptrim([P[0] - alpha if P else -alpha] + list(P[1:]))
        else:
            Q = ptrim([Q[0] - alpha if Q else -alpha] + list(Q[1:]))
        alphas.append(alpha)
        if big_coeff(P, Q, hi) != 0:
            raise ArithmeticError("ladder correction failed to cancel t^lam")
        out.append(
            LadderElement(m=m, alphas=tuple(alphas), P=tuple(P), Q=tuple(Q))
        )
    return out


def _mono_tag(k: int, comp: str) -> str:
    if k == 0:
        return comp
    if k == 1:
        return f"t*{comp}"
    return f"t^{k}*{comp}"


def basis(lam, mu, s, germ_inf: SolutionGerm | None = None,
          omega=F(1)) -> list[VSpaceElement]:
    """Constructive basis of V_s: monomials t^k x, t^l y and ladder elements.

    The element count is cross-checked against the dimension formula; a
    mismatch raises ArithmeticError.  ``germ_inf`` may supply a precomputed
    germ at +infinity (it is deepened automatically when too shallow).
    """
    lam, mu, s = F(lam), F(mu), F(s)
    if lam + mu != 2 or lam == mu:
        raise ValueError("exponents must be distinct with lam + mu = 2")
    if lam.denominator == 1:
        raise ValueError("integer exponents: V_s is a polynomial class")
    if s < lambda_star(lam):
        raise ValueError("s below the minimal growth exponent lambda*")

    if germ_inf is not None:
        if (germ_inf.lam, germ_inf.mu) != (lam, mu) or germ_inf.base != math.inf \
                or germ_inf.direction != 1:
            raise ValueError("germ inconsistent with the requested exponents")
        omega = germ_inf.omega
    sys = unit_system(lam, mu, omega)
    need = max(40, 2 * (math.floor(s - min(lam, mu)) + 6))
    germ = germ_inf if germ_inf is not None and germ_inf.trunc_order >= need \
        else local_germ(sys, math.inf, trunc=need)

    elements: list[VSpaceElement] = []
    mono_counts = {}
    for comp, name in ((0, "x"), (1, "y")):
        P, Q = ([F(1)], []) if comp == 0 else ([], [F(1)])
        prof = growth_profile(P, Q, germ)
        # t^k shifts every exponent by k, so the count is a floor;
        # a log term at the top demands strict inequality
        room = s - prof.exponent
        if prof.log_at_top and room.denominator == 1:
            kmax = math.floor(room) - 1
        else:
            kmax = math.floor(room)
        mono_counts[comp] = kmax
        for k in range(kmax + 1):
            elements.append(VSpaceElement(
                P=tuple([F(0)] * k + [F(1)]) if comp == 0 else (),
                Q=tuple([F(0)] * k + [F(1)]) if comp == 1 else (),
                system=sys, s=s, basis_tag=_mono_tag(k, name),
            ))

    if abs(lam - mu) > 1:
        big = 0 if lam > mu else 1
        k_pref = mono_counts[big] + 1
        cap = math.floor(s - min(lam, mu)) + 2
        for el in ladder(germ, max(cap, 1)):
            P = [F(0)] * k_pref + list(el.P)
            Q = [F(0)] * k_pref + list(el.Q)
            if not growth_profile(P, Q, germ).admits(s):
                break
            ztag = f"z_{el.m}"
            elements.append(VSpaceElement(
                P=tuple(ptrim(P)), Q=tuple(ptrim(Q)), system=sys, s=s,
                basis_tag=_mono_tag(k_pref, ztag),
            ))

    expect = dim_vs(lam, mu, s)
    if len(elements) != expect:
        raise ArithmeticError(
            f"constructed {len(elements)} elements, formula gives {expect}"
        )
    return elements


# ---------------------------------------------------------------------------
# independence oracles


def evaluation_rank(elements, seed: int = 0, trunc: int = 90) -> int:
    """Numerical rank of the evaluation matrix at dim + 3 interior points.

    The elements are evaluated on a generic solution (both frames of the
    germ at 0 with unit coefficients).  Points are drawn on a circle inside
    the convergence disc: on real intervals the monomial families become
    numerically dependent long before dimension 20, while on a circle the
    powers stay close to orthogonal.  Rows are normalized before the SVD.
    """
    if not elements:
        return 0
    sys = elements[0].system
    germ0 = local_germ(sys, 0, trunc=trunc)
    rng = np.random.default_rng(seed)
    ts = 0.55 * np.exp(2j * np.pi * rng.uniform(0, 1, len(elements) + 3))
    rows = []
    for el in elements:
        vals = []
        for t in ts:
            x, y = germ_eval(germ0, complex(t), coeffs=(1.0, 1.0))
            vals.append(peval(list(el.P), complex(t)) * x
                        + peval(list(el.Q), complex(t)) * y)
        rows.append(vals)
    m = np.array(rows, dtype=complex)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    m = m / np.where(norms == 0, 1.0, norms)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > 1e-8 * sv[0]))


def _fraction_rank(rows: list[list[Fraction]]) -> int:
    rank = 0
    cols = len(rows[0]) if rows else 0
    rows = [list(r) for r in rows]
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def coefficient_rank(elements, germ: SolutionGerm | None = None) -> int:
    """Exact rank of the expansion-coefficient matrix over the rationals.

    Decisive for large families where floating-point evaluation matrices
    become ill-conditioned: two elements coincide as functions exactly when
    all their channel coefficients coincide.
    """
    if not elements:
        return 0
    sys = elements[0].system
    maxdeg = max(
        max(pdeg(list(el.P)), pdeg(list(el.Q))) for el in elements
    )
    need = max(40, maxdeg + 30)
    if germ is None or germ.trunc_order < need or germ.base != math.inf:
        germ = local_germ(sys, math.inf, trunc=need)
    chans = _germ_channels(germ)

    rows = []
    for el in elements:
        row: list[Fraction] = []
        for name in ("small", "big", "log"):
            if name not in chans:
                continue
            rho, series = chans[name]
            # descending exponents rho + maxdeg, ..., rho + maxdeg - depth
            depth = germ.trunc_order - 1
            for j in range(depth):
                e = rho + maxdeg - j
                val = F(0)
                for poly, comp in ((el.P, 0), (el.Q, 1)):
                    for k, pk in enumerate(poly):
                        m = rho - e + k
                        if m.denominator == 1 and 0 <= int(m) < len(series):
                            val += pk * series[int(m)][comp]
                row.append(val)
        rows.append(row)
    return _fraction_rank(rows)


# ---------------------------------------------------------------------------
# perturbation spaces of the catalogued systems


@dataclass(frozen=True)
class ApplicationSpace:
    """Degrees, dimension and growth data of one perturbation space.

    ``deg_alpha``/``deg_beta`` are the cofactor degrees of the first and
    second catalogued component (-1 encodes the zero polynomial);
    ``prefactor_power`` is the power of h multiplying the whole bracket
    (nonzero only for the weighted cubic system).  ``s`` is the growth
    exponent used to embed the space, ``accuracy`` the zero-count excess on
    the cut plane and ``sigma_accuracy`` the excess on the real oval
    interval after the forced zero at the center value is spent.
    """

    case_id: str
    n: int
    deg_alpha: int
    deg_beta: int
    dim: int
    s: Fraction
    accuracy: int
    sigma_accuracy: int
    prefactor_power: int
    domain: str


def _domain_str(cid: str) -> str:
    if cid == "sym4":
        return "C minus (-oo, 1/(a+2)]"
    sys = get_case(cid).system
    h1 = fraction_str(sys.h1)
    if sys.cut_sign > 0:
        return f"C minus [{h1}, oo)"
    return f"C minus (-oo, {h1}]"


def application_space(case, n: int) -> ApplicationSpace:
    """Perturbation-space record for one catalogued system and degree n.

    Cases 1-7 take polynomial perturbations of degree n >= 1 (degree pairs
    follow the reduction tables, with the usual conventions at n = 1, 2);
    the weighted case 8 admits n >= 0; the quartic-symmetric family needs
    n >= 2 for a nonzero space.
    """
    cid = case.id if isinstance(case, HamiltonianCase) else str(case)
    if cid not in CASE_IDS:
        raise ValueError(f"unknown case id {cid!r}")
    if n < 0:
        raise ValueError("perturbation degree must be nonnegative")

    pre = 0
    if cid in ("1", "2"):
        if n < 1:
            raise ValueError("cases 1-7 need perturbation degree n >= 1")
        da, db = (n - 1) // 2, (n - 2) // 2
        dim, s, acc = n, F(n + 1, 2), 1
    elif cid == "3":
        if n < 1:
            raise ValueError("cases 1-7 need perturbation degree n >= 1")
        da, db = (n - 1) // 3, (n - 3) // 3
        dim, s, acc = (2 * n + 1) // 3, F(n, 3) + F(1, 2), 1
    elif cid in ("4", "5"):
        if n < 1:
            raise ValueError("cases 1-7 need perturbation degree n >= 1")
        da, db = (n - 1) // 2, (n - 3) // 2
        dim, s, acc = 2 * ((n - 1) // 2) + 1, F((n + 1) // 2), 1
    elif cid in ("6", "7"):
        if n < 1:
            raise ValueError("cases 1-7 need perturbation degree n >= 1")
        if n <= 2:
            da, db = 0, -1
        else:
            da = db = (n - 3) // 2
        dim = (n - 1) // 2 + (n - 1) // 4 + 1
        s = F((n - 1) // 2) + F(1, 2) if n >= 3 else F(1)
        acc = 1 if n <= 6 else (n + 1) // 4
    elif cid == "8":
        # first catalogued component is the higher-weight integral; its
        # cofactor carries the larger degree of the bracket representation
        if n <= 2:
            da, db, pre, s = 1, 0, 0, F(7, 4)
        elif n <= 4:
            da, db, pre, s = 2, 1, -1, F(11, 4)
        else:
            da, db, pre, s = n - 2, n - 3, 3 - n, F(n) - F(5, 4)
        dim = n + 1
        acc = {0: 3, 1: 2, 2: 1, 3: 2}.get(n, n - 3)
    else:  # sym4
        if n < 2:
            raise ValueError("the symmetric quartic family needs n >= 2")
        da, db = (n - 2) // 4, (n - 4) // 4
        dim, s, acc = n // 2, F(n + 1, 4), 1
    return ApplicationSpace(
        case_id=cid, n=n, deg_alpha=da, deg_beta=db, dim=dim, s=s,
        accuracy=acc, sigma_accuracy=max(acc - 1, 0), prefactor_power=pre,
        domain=_domain_str(cid),
    )


def application_table(n_max: int = 12) -> dict:
    """JSON-ready table of perturbation-space records for every case."""
    table: dict[str, list] = {}
    for cid in CASE_IDS:
        start = 0 if cid == "8" else (2 if cid == "sym4" else 1)
        recs = []
        for n in range(start, n_max + 1):
            ap = application_space(cid, n)
            recs.append({
                "case": ap.case_id,
                "n": ap.n,
                "deg_alpha": ap.deg_alpha,
                "deg_beta": ap.deg_beta,
                "dim": ap.dim,
                "s": fraction_str(ap.s),
                "accuracy": ap.accuracy,
                "sigma_accuracy": ap.sigma_accuracy,
                "prefactor_power": ap.prefactor_power,
                "domain": ap.domain,
            })
        table[cid] = recs
    return table


def to_unit_cofactors(alpha, beta, case) -> tuple:
    """Map cofactors of the catalogued components to unit-form (P, Q).

    alpha multiplies the first catalogued integral, beta the second, both
    as polynomials in h.  Returns the polynomials in t with
    P x + Q y = alpha(h) I_1(h) + beta(h) I_2(h) along h = h0 + (h1-h0) t.
    """
    sys = case.system if isinstance(case, HamiltonianCase) else case
    _, tr = to_normal_form(sys, "unit")
    ac = pcompose_affine([F(c) for c in alpha], tr.h_scale, tr.h_shift)
    bc = pcompose_affine([F(c) for c in beta], tr.h_scale, tr.h_shift)
    ti = minv(tr.T)
    P = padd(pscale(ac, ti[0][0]), pscale(bc, ti[1][0]))
    Q = padd(pscale(ac, ti[0][1]), pscale(bc, ti[1][1]))
    return P, Q
