"""Exact rational arithmetic helpers: polynomials and 2x2 matrices over Fraction.

Polynomials are plain lists of Fraction coefficients in ascending order
(``p[k]`` multiplies ``h**k``); the zero polynomial is the empty list.
Matrices are 2x2 nested tuples.  Floating point never enters here; callers
convert explicitly when they need numerics.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

Frac = Fraction
Mat2 = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
Poly = list[Fraction]


def F(x, y=None) -> Fraction:
    return Fraction(x) if y is None else Fraction(x, y)


# ---------------------------------------------------------------------------
# polynomials


def ptrim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def pdeg(p: Sequence[Fraction]) -> int:
    """Degree of p, with deg 0 = -1."""
    p = ptrim(p)
    return len(p) - 1


def padd(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return ptrim(out)


def pscale(p: Sequence[Fraction], c) -> Poly:
    c = Fraction(c)
    return ptrim([c * a for a in p])


def psub(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    return padd(p, pscale(q, -1))


def pmul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return ptrim(out)


def pxshift(p: Sequence[Fraction], k: int) -> Poly:
    """Multiply by h**k."""
    if not ptrim(p):
        return []
    return [Fraction(0)] * k + list(p)


def peval(p: Sequence[Fraction], x):
    """Evaluate at a float/complex/ndarray point; coefficients cast to float."""
    acc = 0.0 * x
    for c in reversed(list(p)):
        acc = acc * x + float(c)
    return acc


def peval_frac(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def pderiv(p: Sequence[Fraction]) -> Poly:
    return ptrim([Fraction(k) * c for k, c in enumerate(p)][1:])


def pcompose_affine(p: Sequence[Fraction], a, b) -> Poly:
    """p(a*u + b) as a polynomial in u (Horner on the affine argument)."""
    a, b = Fraction(a), Fraction(b)
    acc: Poly = []
    for c in reversed(list(p)):
        acc = padd(pmul(acc, [b, a]), [c])
    return acc


def pfloat(p: Sequence[Fraction]) -> list[float]:
    return [float(c) for c in p]


# ---------------------------------------------------------------------------
# 2x2 matrices


def mat(a, b, c, d) -> Mat2:
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


MAT_ID: Mat2 = mat(1, 0, 0, 1)
MAT_ZERO: Mat2 = mat(0, 0, 0, 0)


def madd(A: Mat2, B: Mat2) -> Mat2:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))  # type: ignore


def msub(A: Mat2, B: Mat2) -> Mat2:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))  # type: ignore


def mscale(A: Mat2, c) -> Mat2:
    c = Fraction(c)
    return tuple(tuple(c * a for a in row) for row in A)  # type: ignore


def mmul(A: Mat2, B: Mat2) -> Mat2:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def mvec(A: Mat2, v: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


def mdet(A: Mat2) -> Fraction:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def mtrace(A: Mat2) -> Fraction:
    return A[0][0] + A[1][1]


def minv(A: Mat2) -> Mat2:
    d = mdet(A)
    if d == 0:
        raise ZeroDivisionError("singular 2x2 matrix")
    return ((A[1][1] / d, -A[0][1] / d), (-A[1][0] / d, A[0][0] / d))


def mfloat(A: Mat2):
    return [[float(A[0][0]), float(A[0][1])], [float(A[1][0]), float(A[1][1])]]


def frac_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative Fraction, or None if irrational."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def meigen(A: Mat2) -> tuple[Fraction, Fraction]:
    """Exact eigenvalues of a rational 2x2 matrix.

    Raises ValueError when the eigenvalues are irrational or complex; the
    catalog systems all have rational (triangular) slope matrices.
    """
    tr, det = mtrace(A), mdet(A)
    disc = tr * tr - 4 * det
    r = frac_sqrt(disc)
    if r is None:
        raise ValueError("eigenvalues are not rational (discriminant %s)" % disc)
    return ((tr + r) / 2, (tr - r) / 2)


# ---------------------------------------------------------------------------
# 2x2 matrices with polynomial entries (used for exact operator identities)

PMat = tuple[tuple[Poly, Poly], tuple[Poly, Poly]]


def pmat_from_pair(A0: Mat2, A1: Mat2) -> PMat:
    """Degree-one polynomial matrix A0 + h*A1."""
    return tuple(
        tuple(ptrim([A0[i][j], A1[i][j]]) for j in range(2)) for i in range(2)
    )  # type: ignore


def pmat_add(A: PMat, B: PMat) -> PMat:
    return tuple(tuple(padd(A[i][j], B[i][j]) for j in range(2)) for i in range(2))  # type: ignore


def pmat_sub(A: PMat, B: PMat) -> PMat:
    return tuple(tuple(psub(A[i][j], B[i][j]) for j in range(2)) for i in range(2))  # type: ignore


def pmat_mul(A: PMat, B: PMat) -> PMat:
    out = [[[], []], [[], []]]
    for i in range(2):
        for j in range(2):
            acc: Poly = []
            for k in range(2):
                acc = padd(acc, pmul(A[i][k], B[k][j]))
            out[i][j] = acc
    return tuple(tuple(row) for row in out)  # type: ignore


def pmat_scale_poly(A: PMat, p: Poly) -> PMat:
    return tuple(tuple(pmul(A[i][j], p) for j in range(2)) for i in range(2))  # type: ignore


def pmat_from_const(M: Mat2) -> PMat:
    return tuple(tuple(ptrim([M[i][j]]) for j in range(2)) for i in range(2))  # type: ignore


def pmat_is_zero(A: PMat) -> bool:
    return all(not ptrim(A[i][j]) for i in range(2) for j in range(2))


def fraction_str(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator) if x.denominator != 1 else "%d" % x.numerator


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)
