"""Homogeneous polynomial and hyperplane restriction tests."""

import itertools
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkmkit import linalg, poly
from gkmkit.linalg import qv
from gkmkit.poly import HomogPoly


def test_monomials_order():
    assert poly.monomials(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert poly.monomials(1, 3) == ((3,),)
    assert poly.monomials(3, 0) == ((0, 0, 0),)
    assert poly.monomials(0, 0) == ((),)
    assert poly.monomials(0, 2) == ()
    assert len(poly.monomials(3, 4)) == linalg.graded_dim(3, 4)


def test_arith():
    x = HomogPoly.variable(2, 0)
    y = HomogPoly.variable(2, 1)
    assert (x + y) - y == x
    assert (x * y).coeffs == {(1, 1): Q(1)}
    sq = (x + y) * (x - y)
    assert sq == x * x - y * y
    assert (2 * x).coeffs == {(1, 0): Q(2)}
    assert x.scale(0).is_zero()


def test_degree_mismatch_rejected():
    x = HomogPoly.variable(2, 0)
    with pytest.raises(ValueError):
        x + x * x
    with pytest.raises(ValueError):
        HomogPoly(2, 2, {(1, 0): Q(1)})


def test_evaluate():
    x = HomogPoly.variable(2, 0)
    y = HomogPoly.variable(2, 1)
    p = x * x + 3 * (x * y)
    assert p.evaluate(qv([2, "1/2"])) == Q(7)


def test_compose_linear_substitution():
    # p(x1,x2) = x1*x2, substitute x1 = y1, x2 = y1 + y2
    p = HomogPoly.variable(2, 0) * HomogPoly.variable(2, 1)
    m = ((Q(1), Q(0)), (Q(1), Q(1)))
    q = p.compose_linear(m)
    y1 = HomogPoly.variable(2, 0)
    y2 = HomogPoly.variable(2, 1)
    assert q == y1 * y1 + y1 * y2


def test_coeff_vector_roundtrip():
    p = HomogPoly(2, 2, {(2, 0): Q(1), (1, 1): Q(-3, 2)})
    vec = p.coeff_vector()
    assert vec == (Q(1), Q(-3, 2), Q(0))
    assert HomogPoly.from_coeff_vector(2, 2, vec) == p


def test_restrict_examples():
    x = HomogPoly.variable(2, 0)
    y = HomogPoly.variable(2, 1)
    # x*y vanishes on ker(x1-direction dual): ker (1,0) is the x2-axis
    assert all(c == 0 for c in poly.restrict_to_hyperplane(x * y, qv([1, 0])))
    assert any(c != 0 for c in poly.restrict_to_hyperplane(y * y, qv([1, 0])))
    zero = HomogPoly.zero(2, 2)
    assert all(c == 0 for c in poly.restrict_to_hyperplane(zero, qv([1, 0])))


def test_restriction_matrix_shape():
    m = poly.restriction_matrix(2, 2, qv([1, 0]))
    assert len(m) == linalg.graded_dim(1, 2)
    assert len(m[0]) == linalg.graded_dim(2, 2)
    # applying the matrix equals restricting directly
    p = HomogPoly(2, 2, {(2, 0): Q(2), (0, 2): Q(5)})
    assert linalg.mat_vec(m, p.coeff_vector()) == poly.restrict_to_hyperplane(p, qv([1, 0]))


def test_restriction_rank_one_torus():
    # k = 1: positive-degree polynomials restrict to zero on ker = {0}
    p = HomogPoly(1, 2, {(2,): Q(1)})
    assert poly.restrict_to_hyperplane(p, qv([1])) == ()
    c = HomogPoly.constant(1, 7)
    assert poly.restrict_to_hyperplane(c, qv([1])) == (Q(7),)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def _grid_points(alpha, degree):
    """Exact sample points on ker(alpha), dense enough for the degree."""
    param = poly.kernel_parametrization(alpha)
    npar = len(param[0]) if param else 0
    for ys in itertools.product(range(degree + 1), repeat=npar):
        yield linalg.mat_vec(param, qv(ys))


@given(
    st.integers(2, 3),
    st.integers(1, 3),
    st.data(),
)
@settings(max_examples=40, deadline=None)
def test_restriction_agrees_with_pointwise_vanishing(k, d, data):
    alpha = qv(
        data.draw(
            st.lists(rationals, min_size=k, max_size=k).filter(lambda v: any(v))
        )
    )
    coeffs = data.draw(
        st.lists(rationals, min_size=linalg.graded_dim(k, d), max_size=linalg.graded_dim(k, d))
    )
    f = HomogPoly.from_coeff_vector(k, d, coeffs)
    restricted_zero = all(c == 0 for c in poly.restrict_to_hyperplane(f, alpha))
    vanishes = all(f.evaluate(pt) == 0 for pt in _grid_points(alpha, d))
    assert restricted_zero == vanishes


@given(st.integers(2, 3), st.data())
@settings(max_examples=30, deadline=None)
def test_multiples_of_alpha_restrict_to_zero(k, data):
    alpha = qv(
        data.draw(
            st.lists(rationals, min_size=k, max_size=k).filter(lambda v: any(v))
        )
    )
    coeffs = data.draw(
        st.lists(rationals, min_size=linalg.graded_dim(k, 1), max_size=linalg.graded_dim(k, 1))
    )
    g = HomogPoly.from_coeff_vector(k, 1, coeffs)
    f = HomogPoly.linear_form(alpha) * g
    assert all(c == 0 for c in poly.restrict_to_hyperplane(f, alpha))
