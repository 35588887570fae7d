"""Homogeneous polynomials with exact rational coefficients.

Monomials are exponent tuples; the coefficient order used throughout is
graded lexicographic with variables ordered by index (x1 before x2).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import linalg
from .linalg import Q


@lru_cache(maxsize=None)
def monomials(num_vars: int, degree: int) -> tuple:
    """All exponent tuples of the given total degree, lex-descending."""
    if num_vars == 0:
        return ((),) if degree == 0 else ()

    def gen(k, d):
        if k == 1:
            yield (d,)
            return
        for first in range(d, -1, -1):
            for rest in gen(k - 1, d - first):
                yield (first,) + rest

    return tuple(gen(num_vars, degree))


class HomogPoly:
    """A homogeneous polynomial of fixed degree in a fixed number of variables.

    Zero coefficients are never stored; the zero polynomial still carries its
    nominal degree so that coefficient vectors are well defined.
    """

    __slots__ = ("num_vars", "degree", "coeffs")

    def __init__(self, num_vars: int, degree: int, coeffs: Mapping[tuple, Fraction]):
        clean = {}
        for mono, c in coeffs.items():
            c = Q(c)
            if c == 0:
                continue
            if len(mono) != num_vars or sum(mono) != degree or any(e < 0 for e in mono):
                raise ValueError("monomial %r not of degree %d in %d vars" % (mono, degree, num_vars))
            clean[tuple(mono)] = c
        self.num_vars = num_vars
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def zero(cls, num_vars: int, degree: int) -> "HomogPoly":
        return cls(num_vars, degree, {})

    @classmethod
    def constant(cls, num_vars: int, value) -> "HomogPoly":
        return cls(num_vars, 0, {(0,) * num_vars: Q(value)})

    @classmethod
    def linear_form(cls, vector) -> "HomogPoly":
        """The linear polynomial sum(v[i] * x_{i+1})."""
        k = len(vector)
        coeffs = {}
        for i, c in enumerate(vector):
            if c != 0:
                mono = tuple(1 if j == i else 0 for j in range(k))
                coeffs[mono] = Q(c)
        return cls(k, 1, coeffs)

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "HomogPoly":
        return cls.linear_form(tuple(1 if j == index else 0 for j in range(num_vars)))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, HomogPoly)
            and self.num_vars == other.num_vars
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.num_vars, self.degree, frozenset(self.coeffs.items())))

    def __repr__(self):
        if self.is_zero():
            return "HomogPoly(0; deg %d, %d vars)" % (self.degree, self.num_vars)
        parts = []
        for mono in sorted(self.coeffs, reverse=True):
            c = self.coeffs[mono]
            vars_part = "*".join(
                "x%d" % (i + 1) if e == 1 else "x%d^%d" % (i + 1, e)
                for i, e in enumerate(mono)
                if e
            )
            if not vars_part:
                parts.append(linalg.q_to_str(c))
            elif c == 1:
                parts.append(vars_part)
            else:
                parts.append("%s*%s" % (linalg.q_to_str(c), vars_part))
        return "HomogPoly(%s)" % " + ".join(parts)

    def _binop(self, other, sign):
        if self.num_vars != other.num_vars or self.degree != other.degree:
            raise ValueError("degree/variable mismatch")
        coeffs = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            coeffs[mono] = coeffs.get(mono, Q(0)) + sign * c
        return HomogPoly(self.num_vars, self.degree, coeffs)

    def __add__(self, other):
        return self._binop(other, Q(1))

    def __sub__(self, other):
        return self._binop(other, Q(-1))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "HomogPoly":
        c = Q(c)
        return HomogPoly(self.num_vars, self.degree, {m: c * v for m, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.num_vars != other.num_vars:
            raise ValueError("variable count mismatch")
        coeffs = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                coeffs[m] = coeffs.get(m, Q(0)) + c1 * c2
        return HomogPoly(self.num_vars, self.degree + other.degree, coeffs)

    __rmul__ = __mul__

    def evaluate(self, point) -> Fraction:
        if len(point) != self.num_vars:
            raise ValueError("point length mismatch")
        total = Q(0)
        for mono, c in self.coeffs.items():
            term = c
            for x, e in zip(point, mono):
                if e:
                    term *= Q(x) ** e
            total += term
        return total

    def compose_linear(self, matrix) -> "HomogPoly":
        """Substitute x_i = sum_j matrix[i][j] * y_j.

        matrix has one row per old variable; the result lives in as many
        variables as the matrix has columns.
        """
        if len(matrix) != self.num_vars:
            raise ValueError("matrix must have one row per variable")
        new_vars = len(matrix[0]) if matrix else 0
        forms = [HomogPoly.linear_form(row) for row in matrix]
        powers = [{0: HomogPoly.constant(new_vars, 1)} for _ in forms]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * forms[i]
            return cache[e]

        result = HomogPoly.zero(new_vars, self.degree)
        for mono, c in self.coeffs.items():
            term = HomogPoly.constant(new_vars, c)
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def coeff_vector(self) -> tuple:
        order = monomials(self.num_vars, self.degree)
        return tuple(self.coeffs.get(m, Q(0)) for m in order)

    @classmethod
    def from_coeff_vector(cls, num_vars: int, degree: int, vec) -> "HomogPoly":
        order = monomials(num_vars, degree)
        if len(vec) != len(order):
            raise ValueError("coefficient vector length mismatch")
        return cls(num_vars, degree, dict(zip(order, (Q(v) for v in vec))))


def kernel_parametrization(alpha) -> tuple:
    """Echelon basis of ker(alpha), as a (k x (k-1)) substitution matrix.

    Rows are indexed by the original variables, columns by the kernel
    parameters, so a polynomial p restricts to ker(alpha) as
    p.compose_linear(kernel_parametrization(alpha)).
    """
    if linalg.is_zero_vector(alpha):
        raise ValueError("alpha must be nonzero")
    basis = linalg.nullspace_basis((tuple(alpha),))
    return tuple(tuple(b[i] for b in basis) for i in range(len(alpha)))


def restrict_to_hyperplane(f: HomogPoly, alpha) -> tuple:
    """Linear conditions for f to vanish on the hyperplane ker(alpha).

    Returns the coefficient vector of f composed with the fixed echelon
    parametrization of ker(alpha): one Fraction per degree-d monomial in
    k-1 variables, all zero exactly when alpha divides f.
    """
    if len(alpha) != f.num_vars:
        raise ValueError("alpha length mismatch")
    return f.compose_linear(kernel_parametrization(alpha)).coeff_vector()


@lru_cache(maxsize=None)
def _restriction_matrix_cached(k: int, d: int, alpha: tuple) -> tuple:
    param = kernel_parametrization(alpha)
    cols = []
    for mono in monomials(k, d):
        p = HomogPoly(k, d, {mono: Q(1)})
        cols.append(p.compose_linear(param).coeff_vector())
    return tuple(zip(*cols)) if cols else ()


def restriction_matrix(k: int, d: int, alpha) -> tuple:
    """Matrix of restrict_to_hyperplane on degree-d coefficient vectors.

    Rows are indexed by degree-d monomials in k-1 variables, columns by
    degree-d monomials in k variables; M @ coeffs(f) == restrict_to_hyperplane(f).
    """
    return _restriction_matrix_cached(k, d, tuple(Q(a) for a in alpha))
