"""The nine catalogued Hamiltonian systems and their 2x2 Fuchsian matrices.

Each case ships a plane Hamiltonian H (polynomial; rational for case 8), two
monomial one-forms whose periods along the ovals of {H = h} form the vector
I(h) = (I1, I2), and the exact matrix family A(h) = a0 + h*a1 satisfying
I(h) = A(h) I'(h) on the oval interval Sigma.

Hypotheses verified exactly in rational arithmetic:

* the slope matrix a1 has real distinct eigenvalues,
* det A(h) is quadratic with distinct real roots {h0, h1}, and
  trace A(h) == d/dh det A(h) identically,

with h0 the critical value at which I extends analytically (the value of H
at the surrounded center).  The characteristic exponents are lam = 1/e for
the eigenvalues e of a1, normalised so lam + mu = 2 and lam <= mu.

Normal forms (all transformations exact):

* ``diagonal`` -- a1 diagonalised and h0 moved to the origin;
* ``sheared``  -- additionally J2 = I2 - I1/omega, which makes the second
  row of A proportional to h in its first slot;
* ``unit``     -- the diagonal form rescaled by t = (h - h0)/(h1 - h0), so
  the critical values become {0, 1} and the branch cut is [1, oo).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .rational import (
    F,
    Mat2,
    PMat,
    fraction_str,
    mat,
    mdet,
    meigen,
    minv,
    mmul,
    pmat_from_pair,
    ptrim,
)

DATA_PATH = Path(__file__).parent / "data" / "catalog.json"

CASE_IDS = ("1", "2", "3", "4", "5", "6", "7", "8", "sym4")


def case_ids() -> tuple[str, ...]:
    return CASE_IDS


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class OneForm:
    """A monomial one-form x^xpow * y^ypow d(var), var in {'x','y'}."""

    xpow: int
    ypow: int
    var: str = "x"

    def __str__(self) -> str:
        head = _monomial_str(self.xpow, self.ypow)
        return f"{head} d{self.var}" if head else f"d{self.var}"


@dataclass(frozen=True)
class FuchsianSystem:
    """An affine matrix family A(h) = a0 + h*a1 with exact rational data.

    ``omega`` is the free shear parameter of the normal-form presentation
    the matrices were tabulated in; it is metadata, not an invariant.
    ``cut_sign`` is +1 when the branch cut is [h1, oo) and -1 when it is
    (-oo, h1] (the half line from h1 pointing away from h0).
    """

    a0: Mat2
    a1: Mat2
    h0: Fraction
    h1: Fraction
    lam: Fraction
    mu: Fraction
    omega: Fraction
    cut_sign: int

    def amatrix(self, h: Fraction) -> Mat2:
        return tuple(
            tuple(self.a0[i][j] + h * self.a1[i][j] for j in range(2)) for i in range(2)
        )

    def amatrix_num(self, h):
        """A(h) for float/complex h, as a nested list of numbers."""
        return [
            [float(self.a0[i][j]) + h * float(self.a1[i][j]) for j in range(2)]
            for i in range(2)
        ]

    def pmatrix(self) -> PMat:
        return pmat_from_pair(self.a0, self.a1)

    def det_poly(self) -> list[Fraction]:
        a0, a1 = self.a0, self.a1
        c0 = mdet(a0)
        c1 = (
            a0[0][0] * a1[1][1]
            + a1[0][0] * a0[1][1]
            - a0[0][1] * a1[1][0]
            - a1[0][1] * a0[1][0]
        )
        c2 = mdet(a1)
        return ptrim([c0, c1, c2])

    def trace_poly(self) -> list[Fraction]:
        return ptrim(
            [self.a0[0][0] + self.a0[1][1], self.a1[0][0] + self.a1[1][1]]
        )


@dataclass(frozen=True)
class AffineTransform:
    """Change of frame J(u) = T I(h_scale*u + h_shift) on solution vectors.

    On matrix families this acts as A -> T A(h_scale*u + h_shift) T^-1 / h_scale.
    """

    T: Mat2
    h_scale: Fraction
    h_shift: Fraction

    def inverse(self) -> "AffineTransform":
        return AffineTransform(
            minv(self.T), 1 / self.h_scale, -self.h_shift / self.h_scale
        )

    def h_old(self, u):
        """Map a coordinate of the transformed system back to the original."""
        if isinstance(u, Fraction):
            return self.h_scale * u + self.h_shift
        return float(self.h_scale) * u + float(self.h_shift)

    def h_new(self, h):
        if isinstance(h, Fraction):
            return (h - self.h_shift) / self.h_scale
        return (h - float(self.h_shift)) / float(self.h_scale)


IDENTITY_TRANSFORM = AffineTransform(mat(1, 0, 0, 1), F(1), F(0))


@dataclass(frozen=True)
class HamiltonianCase:
    """One catalogued case: Hamiltonian, period forms, interval and system."""

    id: str
    h_terms: dict  # (xpow, ypow) -> Fraction, H = sum c * x^i * y^j
    form1: OneForm
    form2: OneForm
    m_xpow: int | None  # integrating factor M(x) = x^m_xpow, or None
    sigma: tuple  # (lo, hi) Fractions, hi None for an unbounded interval
    center: tuple  # (x, y) floats, the critical point the ovals surround
    orientation_sign: int  # sign of I1 on positively oriented ovals
    system: FuchsianSystem
    param_a: Fraction | None = None

    def h_string(self) -> str:
        return _poly2_str(self.h_terms)


@dataclass(frozen=True)
class HypothesisReport:
    """Exact verification record for one matrix family."""

    slope_eigenvalues: tuple | None
    slope_eigenvalues_real_distinct: bool
    det_roots: tuple | None
    det_roots_real_distinct: bool
    trace_matches_det_derivative: bool
    declared_critical_values_match: bool
    analyticity_note: str = (
        "analytic continuation of I to h0 is not a rational identity; it is "
        "discharged numerically by germ matching (picard_fuchs, continuation)"
    )

    @property
    def holds(self) -> bool:
        return (
            self.slope_eigenvalues_real_distinct
            and self.det_roots_real_distinct
            and self.trace_matches_det_derivative
            and self.declared_critical_values_match
        )


# ---------------------------------------------------------------------------
# string formatting for Hamiltonians and forms


def _monomial_str(i: int, j: int) -> str:
    parts = []
    if i == 1:
        parts.append("x")
    elif i != 0:
        parts.append(f"x^{i}")
    if j == 1:
        parts.append("y")
    elif j != 0:
        parts.append(f"y^{j}")
    return "*".join(parts)


def _poly2_str(terms: dict) -> str:
    keys = sorted(terms, key=lambda ij: (ij[0] + ij[1], ij[0]))
    out = ""
    for k in keys:
        c = terms[k]
        if c == 0:
            continue
        mono = _monomial_str(*k)
        mag = abs(c)
        if mag == 1 and mono:
            body = mono
        elif mono:
            body = f"{fraction_str(mag)}*{mono}"
        else:
            body = fraction_str(mag)
        if not out:
            out = body if c > 0 else f"-{body}"
        else:
            out += (" + " if c > 0 else " - ") + body
    return out or "0"


def oneform_from_str(s: str) -> OneForm:
    head, _, tail = s.rpartition(" ")
    var = tail[1:]
    i = j = 0
    if head:
        for factor in head.split("*"):
            name, _, exp = factor.partition("^")
            p = int(exp) if exp else 1
            if name == "x":
                i = p
            elif name == "y":
                j = p
            else:
                raise ValueError(f"bad one-form factor {factor!r}")
    return OneForm(i, j, var)


def h_eval(case: HamiltonianCase, x, y):
    """Evaluate H at float/array points (x must avoid 0 for case 8)."""
    tot = 0.0 * (x + y)
    for (i, j), c in case.h_terms.items():
        t = float(c) * x**i
        if j:
            t = t * y**j
        tot = tot + t
    return tot


def h_grad(case: HamiltonianCase, x, y):
    gx = 0.0 * (x + y)
    gy = 0.0 * (x + y)
    for (i, j), c in case.h_terms.items():
        if i:
            gx = gx + float(c) * i * x ** (i - 1) * (y**j if j else 1.0)
        if j:
            gy = gy + float(c) * j * (x**i) * y ** (j - 1)
    return gx, gy


# ---------------------------------------------------------------------------
# the catalogue


def _sys(a0, a1, h0, h1, lam, mu, omega, cut_sign) -> FuchsianSystem:
    return FuchsianSystem(
        a0=a0, a1=a1, h0=F(h0), h1=F(h1), lam=F(lam), mu=F(mu),
        omega=F(omega), cut_sign=cut_sign,
    )


def _build_case(cid: str, a: Fraction | None = None) -> HamiltonianCase:
    f1x = OneForm(0, 1, "x")  # y dx
    if cid == "1":
        return HamiltonianCase(
            id="1",
            h_terms={(0, 2): F(1), (2, 0): F(1), (3, 0): F(-1)},
            form1=f1x, form2=OneForm(1, 1, "x"), m_xpow=None,
            sigma=(F(0), F(4, 27)), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(-4, 15), 0, F(-16, 105)),
                mat(F(6, 5), 0, F(4, 35), F(6, 7)),
                0, F(4, 27), F(5, 6), F(7, 6), -3, +1,
            ),
        )
    if cid == "2":
        return HamiltonianCase(
            id="2",
            h_terms={(0, 2): F(1), (2, 0): F(1), (1, 2): F(-1)},
            form1=f1x, form2=OneForm(1, 1, "x"), m_xpow=None,
            sigma=(F(0), F(1)), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(-4, 3), 0, F(-16, 15)),
                mat(F(4, 3), 0, F(4, 15), F(4, 5)),
                0, 1, F(3, 4), F(5, 4), -2, +1,
            ),
        )
    if cid == "3":
        return HamiltonianCase(
            id="3",
            h_terms={(0, 2): F(1, 2), (2, 0): F(1, 2), (3, 0): F(-1, 3), (1, 2): F(1)},
            form1=f1x, form2=OneForm(2, 1, "x"), m_xpow=None,
            sigma=(F(0), F(1, 6)), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(-1, 2), 0, F(-3, 16)),
                mat(F(3, 2), 0, F(3, 16), F(3, 4)),
                0, F(1, 6), F(2, 3), F(4, 3), -4, +1,
            ),
        )
    if cid == "4":
        return HamiltonianCase(
            id="4",
            h_terms={(0, 2): F(1), (2, 0): F(1), (4, 0): F(1)},
            form1=f1x, form2=OneForm(2, 1, "x"), m_xpow=None,
            sigma=(F(0), None), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(-2, 3), 0, F(4, 15)),
                mat(F(4, 3), 0, F(-2, 15), F(4, 5)),
                0, F(-1, 4), F(3, 4), F(5, 4), 4, -1,
            ),
        )
    if cid == "5":
        return HamiltonianCase(
            id="5",
            h_terms={(0, 2): F(1), (2, 0): F(1), (4, 0): F(-1)},
            form1=f1x, form2=OneForm(2, 1, "x"), m_xpow=None,
            sigma=(F(0), F(1, 4)), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(-2, 3), 0, F(-4, 15)),
                mat(F(4, 3), 0, F(2, 15), F(4, 5)),
                0, F(1, 4), F(3, 4), F(5, 4), -4, +1,
            ),
        )
    if cid == "6":
        return HamiltonianCase(
            id="6",
            h_terms={(0, 2): F(1), (2, 0): F(1), (2, 2): F(1)},
            form1=f1x, form2=OneForm(2, 1, "x"), m_xpow=None,
            sigma=(F(0), None), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, -2, 0, F(4, 3)),
                mat(2, 0, F(-2, 3), F(2, 3)),
                0, -1, F(1, 2), F(3, 2), 2, -1,
            ),
        )
    if cid == "7":
        return HamiltonianCase(
            id="7",
            h_terms={(0, 2): F(1), (2, 0): F(1), (2, 2): F(-1)},
            form1=f1x, form2=OneForm(2, 1, "x"), m_xpow=None,
            sigma=(F(0), F(1)), center=(0.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, -2, 0, F(-4, 3)),
                mat(2, 0, F(2, 3), F(2, 3)),
                0, 1, F(1, 2), F(3, 2), -2, +1,
            ),
        )
    if cid == "8":
        return HamiltonianCase(
            id="8",
            h_terms={(-3, 2): F(1), (-2, 0): F(1), (-1, 0): F(-2)},
            form1=OneForm(-3, 1, "x"), form2=OneForm(-4, 1, "x"), m_xpow=-4,
            sigma=(F(-1), F(0)), center=(1.0, 0.0), orientation_sign=-1,
            system=_sys(
                mat(0, F(4, 3), 0, F(16, 15)),
                mat(F(4, 3), 0, F(4, 15), F(4, 5)),
                -1, 0, F(3, 4), F(5, 4), -2, +1,
            ),
        )
    if cid == "sym4":
        if a is None:
            raise ValueError("case sym4 requires the family parameter a")
        a = F(a)
        if a <= 2:
            raise ValueError("case sym4 requires a > 2 (ovals exist only then)")
        ap2 = a + 2
        return HamiltonianCase(
            id="sym4",
            h_terms={
                (2, 0): F(1), (0, 2): F(1),
                (4, 0): F(-1), (2, 2): -a, (0, 4): F(-1),
            },
            form1=OneForm(2, 0, "y"), form2=OneForm(2, 2, "y"), m_xpow=None,
            sigma=(1 / ap2, F(1, 4)), center=(0.5**0.5, 0.0), orientation_sign=+1,
            system=_sys(
                mat(F(-1, 3), (a - 2) / 3, -1 / (15 * ap2), (a - 14) / (15 * ap2)),
                mat(F(4, 3), 0, 4 / (15 * ap2), F(4, 5)),
                F(1, 4), 1 / ap2, F(3, 4), F(5, 4), -2 * ap2, -1,
            ),
            param_a=a,
        )
    raise ValueError(f"unknown case id {cid!r}")


def get_case(cid, a=None) -> HamiltonianCase:
    """Return a catalogued case by id (1..8 or 'sym4'; sym4 needs a > 2)."""
    cid = str(cid)
    if cid not in CASE_IDS:
        raise ValueError(f"unknown case id {cid!r}; known: {', '.join(CASE_IDS)}")
    return _build_case(cid, a=a)


def all_cases(a=F(3)) -> list[HamiltonianCase]:
    return [get_case(c, a=a) if c == "sym4" else get_case(c) for c in CASE_IDS]


# ---------------------------------------------------------------------------
# hypotheses and exponents


def verify_hypotheses(sys: FuchsianSystem) -> HypothesisReport:
    """Check the two rational hypotheses exactly; nothing is thrown."""
    try:
        e1, e2 = meigen(sys.a1)
        eig = (e1, e2)
        h1_ok = e1 != e2
    except ValueError:
        # irrational eigenvalues: real & distinct iff the discriminant is > 0
        tr = sys.a1[0][0] + sys.a1[1][1]
        disc = tr * tr - 4 * mdet(sys.a1)
        eig = None
        h1_ok = disc > 0

    det = sys.det_poly()
    roots = None
    roots_ok = False
    declared_ok = False
    if len(det) == 3:
        c0, c1, c2 = det
        disc = c1 * c1 - 4 * c0 * c2
        roots_ok = disc > 0
        from .rational import frac_sqrt

        r = frac_sqrt(disc)
        if r is not None and roots_ok:
            roots = ((-c1 + r) / (2 * c2), (-c1 - r) / (2 * c2))
            declared_ok = {roots[0], roots[1]} == {sys.h0, sys.h1}

    trace_ok = sys.trace_poly() == ptrim(
        [det[1] if len(det) > 1 else F(0), 2 * det[2] if len(det) > 2 else F(0)]
    )

    return HypothesisReport(
        slope_eigenvalues=eig,
        slope_eigenvalues_real_distinct=h1_ok,
        det_roots=roots,
        det_roots_real_distinct=roots_ok,
        trace_matches_det_derivative=trace_ok,
        declared_critical_values_match=declared_ok,
    )


def lambda_star(lam) -> Fraction:
    """The effective exponent: 2 for integer lam, else max(|lam-1|, 1-|lam-1|).

    Symmetric under lam <-> mu = 2 - lam, so either exponent may be passed.
    """
    lam = F(lam)
    if lam.denominator == 1:
        return F(2)
    d = abs(lam - 1)
    return max(d, 1 - d)


def exponents(sys: FuchsianSystem):
    """Characteristic exponents (lam, mu, lam_star), lam <= mu, lam + mu = 2."""
    e1, e2 = meigen(sys.a1)
    if e1 == e2:
        raise ValueError("repeated eigenvalue of the slope matrix")
    if e1 == 0 or e2 == 0:
        raise ValueError("singular slope matrix: exponent would be infinite")
    lam, mu = sorted((1 / e1, 1 / e2))
    return lam, mu, lambda_star(lam)


# ---------------------------------------------------------------------------
# normal forms

NORMAL_FORMS = ("diagonal", "sheared", "unit")


def normal_form_template(form: str, lam, mu, omega, slot=F(1)) -> PMat:
    """The target matrix family, as exact degree-1 polynomial entries.

    ``slot`` is the non-origin critical value (h1 - h0 for the diagonal and
    sheared forms; 1 for the unit form).  Entries are polynomials in the
    shifted/rescaled argument.
    """
    lam, mu, omega, slot = F(lam), F(mu), F(omega), F(slot)
    if form == "unit":
        form, slot = "diagonal", F(1)
    if form == "diagonal":
        return (
            (ptrim([-slot / (2 * lam), 1 / lam]), ptrim([omega * slot / (2 * lam)])),
            (ptrim([slot / (2 * mu * omega)]), ptrim([-slot / (2 * mu), 1 / mu])),
        )
    if form == "sheared":
        return (
            (ptrim([F(0), 1 / lam]), ptrim([omega * slot / (2 * lam)])),
            (
                ptrim([F(0), (lam - mu) / (lam * mu * omega)]),
                ptrim([-slot / (lam * mu), 1 / mu]),
            ),
        )
    raise ValueError(f"unknown normal form {form!r}; expected one of {NORMAL_FORMS}")


def _left_eigenvector(m: Mat2, e: Fraction):
    # rows of (m^T - e Id); a nonzero row r gives the kernel vector (r1, -r0),
    # rescaled so the first nonzero entry is 1
    rows = ((m[0][0] - e, m[1][0]), (m[0][1], m[1][1] - e))
    for r in rows:
        if r != (0, 0):
            v = (r[1], -r[0])
            s = v[0] if v[0] != 0 else v[1]
            return (v[0] / s, v[1] / s)
    return (F(1), F(0))


def transform_system(sys: FuchsianSystem, tr: AffineTransform) -> FuchsianSystem:
    """Apply J(u) = T I(c*u + d): new family T A(c*u + d) T^-1 / c.

    ``omega`` is carried through unchanged (it is presentation metadata).
    """
    T, c, d = tr.T, tr.h_scale, tr.h_shift
    Tinv = minv(T)
    base = tuple(
        tuple(sys.a0[i][j] + d * sys.a1[i][j] for j in range(2)) for i in range(2)
    )
    a0n = mmul(mmul(T, base), Tinv)
    a1n = mmul(mmul(T, sys.a1), Tinv)
    a0n = tuple(tuple(v / c for v in row) for row in a0n)
    h0n, h1n = (sys.h0 - d) / c, (sys.h1 - d) / c
    return FuchsianSystem(
        a0=a0n, a1=a1n, h0=h0n, h1=h1n, lam=sys.lam, mu=sys.mu,
        omega=sys.omega, cut_sign=1 if h1n > h0n else -1,
    )


def to_normal_form(sys: FuchsianSystem, form: str = "unit", omega=F(1)):
    """Exact transform to one of the normal forms; returns (system, transform).

    The transform maps the original solution vector I to the new one,
    J(u) = T I(h_scale*u + h_shift).  The free parameter ``omega`` fixes the
    scale of the off-diagonal entries.
    """
    if form not in NORMAL_FORMS:
        raise ValueError(f"unknown normal form {form!r}; expected one of {NORMAL_FORMS}")
    omega = F(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    e1, e2 = meigen(sys.a1)
    if e1 == e2:
        raise ValueError("repeated eigenvalue of the slope matrix")
    lam, mu = sorted((1 / e1, 1 / e2))
    slot = sys.h1 - sys.h0

    # rows of T0 are left eigenvectors of a1, eigenvalue 1/lam first
    t0 = (_left_eigenvector(sys.a1, 1 / lam), _left_eigenvector(sys.a1, 1 / mu))
    T0 = (t0[0], t0[1])
    base = tuple(
        tuple(sys.a0[i][j] + sys.h0 * sys.a1[i][j] for j in range(2))
        for i in range(2)
    )
    c12 = mmul(mmul(T0, base), minv(T0))[0][1]
    if c12 == 0:
        raise ValueError("system decouples; off-diagonal normal form impossible")
    target12 = omega * slot / (2 * lam)
    d1 = target12 / c12
    T = ((d1 * T0[0][0], d1 * T0[0][1]), T0[1])

    if form == "sheared":
        shear = mat(1, 0, -1 / omega, 1)
        T = mmul(shear, T)
    scale = slot if form == "unit" else F(1)
    tr = AffineTransform(T=T, h_scale=scale, h_shift=sys.h0)
    out = transform_system(sys, tr)
    out = FuchsianSystem(
        a0=out.a0, a1=out.a1, h0=out.h0, h1=out.h1, lam=lam, mu=mu,
        omega=omega, cut_sign=out.cut_sign,
    )
    expect = normal_form_template(form, lam, mu, omega, slot=slot)
    if out.pmatrix() != expect:
        raise ValueError(
            "transformed family does not match the normal-form template; "
            "the trace/determinant hypothesis must fail for this input"
        )
    return out, tr


# ---------------------------------------------------------------------------
# JSON serialisation


def _sigma_str(v) -> str:
    return "inf" if v is None else fraction_str(v)


def _sigma_val(s: str):
    return None if s in ("inf", "-inf") else Fraction(s)


def _mat_strs(m: Mat2):
    return [[fraction_str(m[i][j]) for j in range(2)] for i in range(2)]


def _mat_parse(rows) -> Mat2:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def case_to_obj(case: HamiltonianCase) -> dict:
    s = case.system
    return {
        "id": case.id,
        "H": case.h_string(),
        "H_terms": [
            [i, j, fraction_str(c)]
            for (i, j), c in sorted(case.h_terms.items())
        ],
        "forms": [str(case.form1), str(case.form2)],
        "M": f"x^{case.m_xpow}" if case.m_xpow is not None else None,
        "sigma": [_sigma_str(case.sigma[0]), _sigma_str(case.sigma[1])],
        "center": [case.center[0], case.center[1]],
        "orientation": case.orientation_sign,
        "A0": _mat_strs(s.a0),
        "A1": _mat_strs(s.a1),
        "h0": fraction_str(s.h0),
        "h1": fraction_str(s.h1),
        "lambda": fraction_str(s.lam),
        "mu": fraction_str(s.mu),
        "omega": fraction_str(s.omega),
        "cut": s.cut_sign,
        "a": fraction_str(case.param_a) if case.param_a is not None else None,
    }


def case_from_obj(obj: dict) -> HamiltonianCase:
    system = FuchsianSystem(
        a0=_mat_parse(obj["A0"]),
        a1=_mat_parse(obj["A1"]),
        h0=Fraction(obj["h0"]),
        h1=Fraction(obj["h1"]),
        lam=Fraction(obj["lambda"]),
        mu=Fraction(obj["mu"]),
        omega=Fraction(obj["omega"]),
        cut_sign=int(obj["cut"]),
    )
    m = obj.get("M")
    return HamiltonianCase(
        id=obj["id"],
        h_terms={(i, j): Fraction(c) for i, j, c in obj["H_terms"]},
        form1=oneform_from_str(obj["forms"][0]),
        form2=oneform_from_str(obj["forms"][1]),
        m_xpow=int(m.split("^")[1]) if m else None,
        sigma=(_sigma_val(obj["sigma"][0]), _sigma_val(obj["sigma"][1])),
        center=(obj["center"][0], obj["center"][1]),
        orientation_sign=int(obj["orientation"]),
        system=system,
        param_a=Fraction(obj["a"]) if obj.get("a") is not None else None,
    )


def dump_catalog(cases=None) -> str:
    if cases is None:
        cases = all_cases()
    return json.dumps([case_to_obj(c) for c in cases], indent=2) + "\n"


def load_catalog(path=DATA_PATH) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        objs = json.load(fh)
    return {obj["id"]: case_from_obj(obj) for obj in objs}
