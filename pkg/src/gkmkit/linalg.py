"""Exact linear algebra over the rationals.

Vectors are tuples of ``fractions.Fraction``, matrices are tuples of such
row tuples.  Everything is pure and exact; no floating point is used
anywhere in the package.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Q = Fraction

QVector = "tuple[Fraction, ...]"
QMatrix = "tuple[tuple[Fraction, ...], ...]"


def qv(entries: Iterable) -> tuple:
    """Coerce ints, strings or Fractions to an exact vector."""
    return tuple(Q(e) for e in entries)


def qm(rows: Iterable[Iterable]) -> tuple:
    m = tuple(qv(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zeros(n: int) -> tuple:
    return (Q(0),) * n


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c, v):
    c = Q(c)
    return tuple(c * a for a in v)


def vec_neg(v):
    return tuple(-a for a in v)


def dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Q(0))


def is_zero_vector(v) -> bool:
    return all(a == 0 for a in v)


def transpose(m) -> tuple:
    return tuple(zip(*m)) if m else ()


def mat_vec(m, v) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a, b) -> tuple:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def identity(n: int) -> tuple:
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(n)) for i in range(n))


def clear_denominators(v) -> tuple:
    """Scale a rational vector to integers (as Fractions), keeping the sign."""
    den = math.lcm(*(a.denominator for a in v)) if v else 1
    return tuple(a * den for a in v)


def primitive_integer_vector(v) -> tuple:
    """The primitive integer vector on the ray of v (sign preserved)."""
    w = clear_denominators(v)
    g = math.gcd(*(abs(a.numerator) for a in w)) if w else 0
    if g == 0:
        return w
    return tuple(a / g for a in w)


def rank(m) -> int:
    """Rank over Q, by fraction-free (Bareiss) elimination on integer rows."""
    if not m or not m[0]:
        return 0
    rows = [[x.numerator for x in clear_denominators(r)] for r in m]
    nrows, ncols = len(rows), len(rows[0])
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pivval = rows[r][c]
        for i in range(r + 1, nrows):
            if rows[i][c] == 0 and prev == 1:
                continue
            fi = rows[i][c]
            row = rows[i]
            prow = rows[r]
            for j in range(c, ncols):
                row[j] = (row[j] * pivval - fi * prow[j]) // prev
        prev = pivval
        r += 1
        if r == nrows:
            break
    return r


def rref(m) -> tuple:
    """Reduced row echelon form. Returns (rows, pivot column indices)."""
    rows = [list(r) for r in m]
    if not rows:
        return (), ()
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows), tuple(pivots)


def nullspace_basis(m) -> tuple:
    """Echelon-parametrized basis of the right kernel.

    One basis vector per free column, carrying 1 in that column; the result
    is deterministic and ordered by free column index.
    """
    if not m:
        return ()
    ncols = len(m[0])
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        vec = [Q(0)] * ncols
        vec[f] = Q(1)
        for r, c in enumerate(pivots):
            vec[c] = -red[r][f]
        basis.append(tuple(vec))
    return tuple(basis)


def solve_in_span(target, generators) -> Optional[tuple]:
    """Coefficients expressing target in the span of the generators.

    Returns a tuple of Fractions (free coefficients fixed to 0, so the
    answer is deterministic) or None if target is outside the span.
    """
    gens = tuple(generators)
    if not gens:
        return () if is_zero_vector(target) else None
    n = len(target)
    if any(len(g) != n for g in gens):
        raise ValueError("generator/target length mismatch")
    aug = tuple(tuple(g[i] for g in gens) + (target[i],) for i in range(n))
    red, pivots = rref(aug)
    if len(gens) in pivots:
        return None
    coeffs = [Q(0)] * len(gens)
    for r, c in enumerate(pivots):
        coeffs[c] = red[r][-1]
    return tuple(coeffs)


def solve_unique(a, b) -> tuple:
    """Solve a x = b for square invertible a; raises on singular input."""
    n = len(a)
    aug = tuple(tuple(a[i]) + (b[i],) for i in range(n))
    red, pivots = rref(aug)
    if len(pivots) != n or any(p >= n for p in pivots):
        raise ValueError("singular system")
    return tuple(red[i][-1] for i in range(n))


def invert(a) -> tuple:
    n = len(a)
    aug = tuple(tuple(a[i]) + identity(n)[i] for i in range(n))
    red, pivots = rref(aug)
    if tuple(pivots[:n]) != tuple(range(n)):
        raise ValueError("matrix not invertible")
    return tuple(tuple(red[i][n:]) for i in range(n))


def det(a) -> Fraction:
    """Determinant by exact elimination."""
    n = len(a)
    work = [[Q(x) for x in row] for row in a]
    if any(len(row) != n for row in work):
        raise ValueError("square matrix required")
    sign = 1
    out = Q(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if work[r][c]), None)
        if piv is None:
            return Q(0)
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        out *= work[c][c]
        for r in range(c + 1, n):
            if work[r][c]:
                f = work[r][c] / work[c][c]
                for cc in range(c + 1, n):
                    work[r][cc] -= f * work[c][cc]
    return out if sign > 0 else -out


def graded_dim(k: int, d: int) -> int:
    """Dimension of the degree-d part of a polynomial ring in k variables."""
    if d < 0:
        return 0
    if k == 0:
        return 1 if d == 0 else 0
    return math.comb(k + d - 1, k - 1)


def hermite_basis(rows: Sequence[Sequence[int]]) -> tuple:
    """Row-style Hermite basis of the integer lattice spanned by the rows.

    Pivots are positive, entries above a pivot are reduced modulo it, zero
    rows are dropped.  Input rows must be integers.
    """
    work = [list(int(x) for x in r) for r in rows if any(r)]
    if not work:
        return ()
    ncols = len(work[0])
    basis = []
    r = 0
    for c in range(ncols):
        live = [i for i in range(r, len(work)) if work[i][c] != 0]
        if not live:
            continue
        while True:
            live.sort(key=lambda i: abs(work[i][c]))
            i0 = live[0]
            work[r], work[i0] = work[i0], work[r]
            done = True
            for i in range(r + 1, len(work)):
                if work[i][c] != 0:
                    q = work[i][c] // work[r][c]
                    work[i] = [x - q * y for x, y in zip(work[i], work[r])]
                    if work[i][c] != 0:
                        done = False
            live = [i for i in range(r, len(work)) if work[i][c] != 0]
            if done or len(live) <= 1:
                break
        if work[r][c] < 0:
            work[r] = [-x for x in work[r]]
        for i in range(r):
            q = work[i][c] // work[r][c]
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return tuple(tuple(row) for row in work[:r])


def in_lattice(basis, v: Sequence[int]) -> bool:
    """Membership of an integer vector in the lattice with Hermite basis rows."""
    vec = [int(x) for x in v]
    ncols = len(vec) if vec else 0
    rows = [list(r) for r in basis]
    i = 0
    for c in range(ncols):
        if i < len(rows) and rows[i][c] != 0:
            if vec[c] % rows[i][c] != 0:
                return False
            q = vec[c] // rows[i][c]
            vec = [x - q * y for x, y in zip(vec, rows[i])]
            i += 1
        elif vec[c] != 0:
            return False
    return all(x == 0 for x in vec)


def q_to_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def q_from_str(s: str) -> Fraction:
    return Q(s)


def vec_to_strs(v) -> list:
    return [q_to_str(x) for x in v]


def vec_from_strs(ss) -> tuple:
    return tuple(Q(s) for s in ss)
