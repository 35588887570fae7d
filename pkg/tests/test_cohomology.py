"""Equivariant cohomology: bases, Betti recursions, facet classes, actions."""

import functools

import pytest
from hypothesis import given, settings, strategies as st

from gkmkit.cohomology import (
    BettiReport,
    CohomologyClass,
    _betti_from_dims,
    add_classes,
    betti_numbers,
    class_action,
    class_from_vector,
    class_vector,
    constant_class,
    equivariant_basis,
    equivariant_dim,
    facet_class,
    facet_orbit_bound,
    invariant_betti,
    invariant_equivariant_dim,
    is_valid_class,
    is_zero_class,
    multiply_classes,
    ordinary_zero_check,
    scale_class,
    sparse_rank,
)
from gkmkit.covering import (
    build_covering,
    deck_group,
    enumerate_product_facets,
    pull_back_labels,
)
from gkmkit.errors import FormalityViolation, NoSuchClass, NotCompatible
from gkmkit.extension import extend_to_gkm_n, induced_weight_action
from gkmkit.faces import Face, enumerate_faces
from gkmkit.graph import GraphAutomorphism
from gkmkit.linalg import qm, rank
from gkmkit.models import (
    hirzebruch_model,
    sigma_model,
    simplex_model,
    weighted_projective_model,
)
from gkmkit.poly import HomogPoly

from _fixtures import (
    cube,
    d2xd1,
    d2xs2,
    pentagon,
    quotient_model,
    reduced_model,
    square,
)


# -- equivariant bases ---------------------------------------------------------


def test_degree_one_dimensions():
    assert equivariant_dim(simplex_model(2), 1) == 3
    assert equivariant_dim(sigma_model(2), 1) == 2


def test_basis_matches_dimension_and_is_valid():
    for g in (simplex_model(2), sigma_model(2), square()):
        for d in range(4):
            basis = equivariant_basis(g, d)
            assert len(basis) == equivariant_dim(g, d)
            for cls in basis:
                assert cls.degree == d
                assert is_valid_class(g, cls).ok


def test_class_vector_round_trip():
    g = square()
    for cls in equivariant_basis(g, 2):
        again = class_from_vector(g, 2, class_vector(g, cls))
        assert class_vector(g, again) == class_vector(g, cls)


# -- Betti numbers ----------------------------------------------------------------


BETTI_TABLE = [
    (lambda: simplex_model(2), (1, 1, 1)),
    (lambda: simplex_model(3), (1, 1, 1, 1)),
    (lambda: simplex_model(4), (1, 1, 1, 1, 1)),
    (lambda: sigma_model(2), (1, 0, 1)),
    (lambda: sigma_model(3), (1, 0, 0, 1)),
    (lambda: hirzebruch_model(1), (1, 2, 1)),
    (lambda: weighted_projective_model(1, 2), (1, 1, 1)),
    (square, (1, 2, 1)),
    (cube, (1, 3, 3, 1)),
    (d2xd1, (1, 2, 2, 1)),
    (d2xs2, (1, 1, 2, 1, 1)),
    (lambda: quotient_model(3), (1, 1, 1, 1)),
    (lambda: quotient_model(5), (1, 1, 6, 6, 1, 1)),
    (lambda: reduced_model(3), (1, 3, 3, 1)),
    (pentagon, (1, 3, 1)),
]


@pytest.mark.parametrize("build,expected", BETTI_TABLE)
def test_betti_numbers(build, expected):
    g = build()
    rep = betti_numbers(g)
    assert rep.betti == expected
    assert rep.total == len(g.vertices)
    assert rep.guard_checked


def test_betti_guard_flag_can_be_skipped():
    rep = betti_numbers(square(), guard=False)
    assert rep.betti == (1, 2, 1)
    assert not rep.guard_checked


def test_poincare_symmetry():
    for build, expected in BETTI_TABLE:
        assert expected == tuple(reversed(expected))


def test_quotient5_equivariant_dimensions():
    g = quotient_model(5)
    rep = betti_numbers(g)
    assert rep.equivariant == (1, 5, 20, 60, 140, 276)
    assert equivariant_dim(g, 6) == 484


# -- recursion guard (white box) -----------------------------------------------------


def test_recursion_rejects_negative_coefficient():
    g = square()
    with pytest.raises(FormalityViolation) as err:
        _betti_from_dims(g, [1, 1, 5, 9], 4, 3, "equivariant")
    assert "negative" in str(err.value)


def test_recursion_rejects_wrong_total():
    g = square()
    with pytest.raises(FormalityViolation) as err:
        _betti_from_dims(g, [1, 3, 8, 12], 4, 3, "equivariant")
    assert "sum" in str(err.value)


def test_recursion_rejects_guard_mismatch():
    g = square()
    # dims (1, 4, 8) give the square's (1, 2, 1); degree 3 must then be 12
    with pytest.raises(FormalityViolation) as err:
        _betti_from_dims(g, [1, 4, 8, 13], 4, 3, "equivariant")
    assert "guard" in str(err.value)
    rep = _betti_from_dims(g, [1, 4, 8, 12], 4, 3, "equivariant")
    assert rep.betti == (1, 2, 1)


# -- invariant Betti numbers -----------------------------------------------------------


def test_invariant_betti_with_identity_matches_plain():
    g = cube()
    ident = GraphAutomorphism.identity(g)
    rep = invariant_betti(g, [ident])
    assert rep.betti == betti_numbers(g).betti
    assert invariant_equivariant_dim(g, [ident], 2) == equivariant_dim(g, 2)


def test_invariant_betti_of_quotient5_deck_action():
    g = quotient_model(5)
    cov = build_covering(g)
    pulled = pull_back_labels(cov)
    autos = [pulled.automorphism(d) for d in deck_group(cov).elements]
    rep = invariant_betti(pulled.graph, autos)
    assert rep.betti == (1, 1, 6, 6, 1, 1)
    assert rep.total == 16
    assert rep.betti == betti_numbers(g).betti


def test_invariant_betti_rejects_label_breaking_automorphism():
    g = square()
    quarter = GraphAutomorphism.from_vertex_map(
        g, {"0.0": "0.1", "0.1": "1.1", "1.1": "1.0", "1.0": "0.0"}
    )
    with pytest.raises(NotCompatible):
        invariant_betti(g, [quarter])


# -- class arithmetic --------------------------------------------------------------------


def test_multiplication_degree_and_validity():
    g = simplex_model(2)
    basis = equivariant_basis(g, 1)
    prod = multiply_classes(basis[0], basis[1])
    assert prod.degree == 2
    assert is_valid_class(g, prod).ok


def test_multiplication_is_commutative_and_associative():
    g = square()
    a, b, c = equivariant_basis(g, 1)[:3]
    ab = multiply_classes(a, b)
    ba = multiply_classes(b, a)
    assert class_vector(g, ab) == class_vector(g, ba)
    left = multiply_classes(ab, c)
    right = multiply_classes(a, multiply_classes(b, c))
    assert class_vector(g, left) == class_vector(g, right)


def test_unit_and_zero_classes():
    g = square()
    one = constant_class(g, HomogPoly.constant(g.torus_rank, 1))
    for cls in equivariant_basis(g, 1):
        again = multiply_classes(one, cls)
        assert class_vector(g, again) == class_vector(g, cls)
    zero = scale_class(0, one)
    assert is_zero_class(zero)
    assert not is_zero_class(one)
    summed = add_classes(cls, scale_class(-1, cls))
    assert is_zero_class(summed)


def test_is_valid_class_flags_divisibility_failure():
    g = sigma_model(2)
    entries = {
        "0": HomogPoly.linear_form((1, 0)),
        "1": HomogPoly.zero(2, 1),
    }
    verdict = is_valid_class(g, CohomologyClass(1, entries))
    assert not verdict.ok
    assert "edge" in verdict.witness


# -- facet classes ---------------------------------------------------------------------


def facets_of(g):
    return enumerate_faces(g, g.valence - 1)


def test_facet_class_normalization_on_square():
    g = square()
    bottom = [
        f for f in facets_of(g) if set(f.vertices) == {"0.0", "1.0"}
    ][0]
    cls = facet_class(g, bottom)
    assert cls.degree == 1
    # entry at the lex-first face vertex is the normal weight, here (0, 1)
    assert cls.entry("0.0") == HomogPoly.linear_form((0, 1))
    assert cls.entry("0.1").is_zero()
    assert cls.entry("1.1").is_zero()
    assert is_valid_class(g, cls).ok


def test_facet_class_on_rank_one_segment():
    # the facets of the segment are its two vertices; there are no edge
    # constraints at all, so the class comes from the unit-vector fallback
    g = simplex_model(1)
    vertex = Face(vertices=("0",), undirected=(), directed=(), dim=0)
    cls = facet_class(g, vertex)
    assert is_valid_class(g, cls).ok
    assert cls.entry("0") == HomogPoly.linear_form((1,))
    assert cls.entry("1").is_zero()


def test_facet_class_rejects_wrong_dimension():
    g = cube()
    one_face = enumerate_faces(g, 1)[0]
    with pytest.raises(NoSuchClass):
        facet_class(g, one_face)


def test_quotient5_has_no_facet_classes():
    g = quotient_model(5)
    for f in facets_of(g):
        assert set(f.vertices) == set(g.vertices)
        with pytest.raises(NoSuchClass):
            facet_class(g, f)


@pytest.mark.parametrize(
    "build,expected_rank",
    [
        (lambda: simplex_model(2), 3),
        (square, 4),
        (cube, 6),
        (lambda: hirzebruch_model(1), 4),
    ],
)
def test_facet_classes_span_degree_one(build, expected_rank):
    g = build()
    classes = [facet_class(g, f) for f in facets_of(g)]
    vectors = [class_vector(g, c) for c in classes]
    assert rank(qm(vectors)) == expected_rank
    assert expected_rank == equivariant_dim(g, 1)


# -- ordinary products of facet classes ---------------------------------------------------


def test_square_facet_products():
    g = square()
    classes = {
        frozenset(f.vertices): facet_class(g, f) for f in facets_of(g)
    }
    bottom = classes[frozenset({"0.0", "1.0"})]
    top = classes[frozenset({"0.1", "1.1"})]
    left = classes[frozenset({"0.0", "0.1"})]
    right = classes[frozenset({"1.0", "1.1"})]
    # opposite facets never meet: their product is ordinarily zero
    assert ordinary_zero_check(g, multiply_classes(bottom, top))
    assert ordinary_zero_check(g, multiply_classes(left, right))
    # adjacent facets meet in a vertex
    assert not ordinary_zero_check(g, multiply_classes(bottom, left))
    # self-intersections of fiber classes vanish here
    for cls in (bottom, top, left, right):
        assert ordinary_zero_check(g, multiply_classes(cls, cls))


def test_cube_opposite_facets_annihilate():
    g = cube()
    classes = [(f, facet_class(g, f)) for f in facets_of(g)]
    for i, (f1, c1) in enumerate(classes):
        for f2, c2 in classes[i + 1:]:
            prod = multiply_classes(c1, c2)
            if set(f1.vertices) & set(f2.vertices):
                assert not ordinary_zero_check(g, prod)
            else:
                assert ordinary_zero_check(g, prod)


def test_simplex_facet_products_are_nonzero():
    g = simplex_model(2)
    classes = [facet_class(g, f) for f in facets_of(g)]
    for i, c1 in enumerate(classes):
        for c2 in classes[i:]:
            assert not ordinary_zero_check(g, multiply_classes(c1, c2))


def test_ordinary_zero_check_edge_cases():
    g = square()
    one = constant_class(g, HomogPoly.constant(2, 1))
    assert not ordinary_zero_check(g, one)
    assert ordinary_zero_check(g, scale_class(0, one))
    # a positive-degree constant class is ordinarily zero
    xconst = constant_class(g, HomogPoly.linear_form((1, 0)))
    assert ordinary_zero_check(g, xconst)


# -- the twisted pull-back of the rank-4 quotient ------------------------------------------


@functools.lru_cache(maxsize=1)
def extended_quotient5():
    g = quotient_model(5)
    cov = build_covering(g)
    pulled = pull_back_labels(cov)
    ext = extend_to_gkm_n(pulled.graph)
    eg = ext.extended_graph()
    autos = [pulled.automorphism(d) for d in deck_group(cov).elements]
    report = induced_weight_action(ext, autos)
    by_tokens = {}
    for pf in enumerate_product_facets(cov.product):
        key = frozenset(pulled.vertex_token[pv] for pv in pf.vertices)
        by_tokens[key] = (pf.factor, pf.index)
    tau = {}
    for face in enumerate_faces(eg, 4):
        tau[by_tokens[frozenset(face.vertices)]] = face
    tau = {key: facet_class(eg, f) for key, f in tau.items()}
    return eg, report, tau


def test_extended_quotient5_has_ten_spanning_facet_classes():
    eg, report, tau = extended_quotient5()
    assert len(tau) == 10
    assert set(tau) == {(i, j) for i in range(5) for j in range(2)}
    vectors = [class_vector(eg, c) for c in tau.values()]
    assert rank(qm(vectors)) == 10
    assert equivariant_dim(eg, 1) == 10


def nontrivial_pair(report):
    for auto, mat in zip(report.automorphisms, report.matrices):
        if not auto.is_identity:
            return auto, mat
    raise AssertionError("no nontrivial deck element")


def test_deck_action_swaps_untwisted_facets():
    eg, report, tau = extended_quotient5()
    auto, mat = nontrivial_pair(report)
    for i in range(1, 5):
        for j in (0, 1):
            moved = class_action(eg, tau[(i, j)], auto, matrix=mat)
            assert class_vector(eg, moved) == class_vector(
                eg, tau[(i, 1 - j)]
            )


def test_deck_action_negates_twisted_facets():
    eg, report, tau = extended_quotient5()
    auto, mat = nontrivial_pair(report)
    for j in (0, 1):
        moved = class_action(eg, tau[(0, j)], auto, matrix=mat)
        expected = scale_class(-1, tau[(0, 1 - j)])
        assert class_vector(eg, moved) == class_vector(eg, expected)


def test_twisted_difference_is_invariant_with_nonzero_square():
    eg, report, tau = extended_quotient5()
    auto, mat = nontrivial_pair(report)
    v = add_classes(tau[(0, 0)], scale_class(-1, tau[(0, 1)]))
    moved = class_action(eg, v, auto, matrix=mat)
    assert class_vector(eg, moved) == class_vector(eg, v)
    assert not ordinary_zero_check(eg, v)
    assert not ordinary_zero_check(eg, multiply_classes(v, v))


def test_untwisted_sums_vanish_ordinarily():
    eg, report, tau = extended_quotient5()
    for i in range(1, 5):
        total = add_classes(tau[(i, 0)], tau[(i, 1)])
        assert ordinary_zero_check(eg, total)


def test_opposite_extended_facets_annihilate():
    eg, report, tau = extended_quotient5()
    for i in range(5):
        prod = multiply_classes(tau[(i, 0)], tau[(i, 1)])
        assert ordinary_zero_check(eg, prod)


def test_facet_orbit_bound_on_quotient5():
    eg, report, tau = extended_quotient5()
    g = quotient_model(5)
    cov = build_covering(g)
    pulled = pull_back_labels(cov)
    autos = [pulled.automorphism(d) for d in deck_group(cov).elements]
    facets = [
        (frozenset(f.vertices), frozenset(f.undirected))
        for f in enumerate_faces(pulled.graph, 4)
    ]
    assert facet_orbit_bound(pulled.graph, autos, facets) == 4


# -- sparse rank cross-check -----------------------------------------------------------------


matrix_strategy = st.lists(
    st.lists(st.integers(-4, 4), min_size=1, max_size=5),
    min_size=1,
    max_size=5,
).filter(lambda rows: len({len(r) for r in rows}) == 1)


@given(matrix_strategy)
@settings(max_examples=100)
def test_sparse_rank_matches_dense_rank(rows):
    sparse = [
        {j: x for j, x in enumerate(row) if x != 0} for row in rows
    ]
    assert sparse_rank(sparse) == rank(qm(rows))
