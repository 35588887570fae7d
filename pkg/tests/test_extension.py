"""Extension of rank-k labels to full rank n over simplex-product graphs."""

import pytest

from gkmkit.covering import build_covering, deck_group, pull_back_labels
from gkmkit.errors import (
    ActionNotCompatible,
    DependentLabels,
    NotProductOfSimplices,
)
from gkmkit.extension import (
    WeightLattice,
    extend_to_gkm_n,
    induced_weight_action,
    transport_weights,
)
from gkmkit.graph import (
    GkmGraph,
    GraphAutomorphism,
    Weight,
    undirected_id,
)
from gkmkit.linalg import identity, mat_mul, mat_vec, qm, rank
from gkmkit.models import simplex_model

from _fixtures import (
    ALL_PRODUCTS,
    fr,
    projected_rank3_product,
    quotient_model,
    square,
)


# -- transport ------------------------------------------------------------------


def test_transport_keeps_traversed_edge_and_mixes_the_rest():
    g = simplex_model(2)
    star = g.star("0")
    values = {e: (1, 0) if e == "0-1" else (0, 1) for e in star}
    out = transport_weights(g, "0-1", values)
    assert set(out) == set(g.star("1"))
    # the traversed edge keeps its value on the reverse side
    assert fr(out["0-1~"]) == fr((1, 0))
    # the companion edge picks up p*value(other) + q*value(along) with
    # (p, q) = (-1, 1), matching alpha(1-2) = -alpha(0-2) + alpha(0-1)
    assert fr(out["1-2"]) == fr((1, -1))


# -- extension on products ---------------------------------------------------------


@pytest.mark.parametrize("name,build", ALL_PRODUCTS)
def test_extension_exists_and_projects_onto_labels(name, build):
    g = build()
    ext = extend_to_gkm_n(g)
    n = g.valence
    assert len(ext.basis_edges) == n
    # beta is recorded per directed edge, same vector in both directions
    assert set(ext.beta) == set(g.edges)
    for uid in g.undirected_ids():
        assert fr(ext.beta[uid + "~"]) == fr(ext.beta[uid])
        image = mat_vec(ext.phi, ext.beta[uid])
        assert Weight(image).vector == g.weights[uid].vector


@pytest.mark.parametrize("name,build", ALL_PRODUCTS)
def test_extension_is_independent_at_every_vertex(name, build):
    g = build()
    ext = extend_to_gkm_n(g)
    n = g.valence
    for v in g.vertices:
        rows = [ext.beta[undirected_id(e)] for e in g.star(v)]
        assert rank(qm(rows)) == n


@pytest.mark.parametrize("name,build", ALL_PRODUCTS)
def test_extension_is_spanning_tree_independent(name, build):
    # transporting the same seed along a depth-first tree must reproduce
    # the betas, which extend_to_gkm_n computes along a breadth-first tree
    g = build()
    ext = extend_to_gkm_n(g)
    base = ext.base_vertex
    n = g.valence
    seed = {}
    for i, uid in enumerate(ext.basis_edges):
        for f in g.star(base):
            if undirected_id(f) == uid:
                seed[f] = tuple(1 if j == i else 0 for j in range(n))
    values = {base: dict(seed)}
    stack = [base]
    while stack:
        v = stack.pop()
        for e in sorted(g.star(v), reverse=True):
            w = g.edges[e].target
            if w not in values:
                values[w] = transport_weights(g, e, values[v])
                stack.append(w)
    assert set(values) == set(g.vertices)
    for v, vals in values.items():
        for e, vec in vals.items():
            assert tuple(ext.beta[undirected_id(e)]) == tuple(vec)


def test_extended_graph_is_a_full_rank_model():
    g = projected_rank3_product()
    ext = extend_to_gkm_n(g)
    eg = ext.extended_graph()
    assert eg.torus_rank == g.valence == 4
    from gkmkit.graph import gkm_order, validate_structure
    assert validate_structure(eg).ok
    assert gkm_order(eg) == 4


# -- frozen extension of the projected product --------------------------------------


def test_projected_product_extension_table():
    g = projected_rank3_product()
    ext = extend_to_gkm_n(g)
    assert ext.base_vertex == "0.0"
    assert ext.basis_edges == (
        "0.0-0.1:1",
        "0.0-0.1:2",
        "0.0-1.0",
        "0.0-2.0",
    )
    e1, e2, e3, e4 = identity(4)
    expected = {
        "0.0-0.1:1": e1,
        "0.0-0.1:2": e2,
        "0.0-1.0": e3,
        "0.0-2.0": e4,
        "0.1-1.1": e3,
        "0.1-2.1": e4,
        "1.0-1.1:1": e1,
        "1.0-1.1:2": e2,
        "1.0-2.0": fr((0, 0, 1, -1)),
        "1.1-2.1": fr((0, 0, 1, -1)),
        "2.0-2.1:1": e1,
        "2.0-2.1:2": e2,
    }
    assert {
        uid: fr(ext.beta[uid]) for uid in g.undirected_ids()
    } == expected
    assert ext.phi == qm([[0, 1, 1, 0], [0, 1, 0, 1], [1, 1, 0, 0]])


# -- failure modes --------------------------------------------------------------------


def test_extension_needs_pairwise_independent_labels():
    conn = {
        "a": {"a": "a~", "b": "b~"},
        "a~": {"a~": "a", "b~": "b"},
        "b": {"a": "a~", "b": "b~"},
        "b~": {"a~": "a", "b~": "b"},
    }
    g = GkmGraph.build(
        2,
        [("a", "u", "v", (1, 0)), ("b", "u", "v", (1, 0))],
        connection=conn,
    )
    with pytest.raises(DependentLabels):
        extend_to_gkm_n(g)


def test_extension_refuses_nontrivially_covered_graphs():
    with pytest.raises(NotProductOfSimplices):
        extend_to_gkm_n(quotient_model(3))


# -- induced actions -------------------------------------------------------------------


def quotient5_action():
    g = quotient_model(5)
    cov = build_covering(g)
    pulled = pull_back_labels(cov)
    ext = extend_to_gkm_n(pulled.graph)
    autos = [pulled.automorphism(d) for d in deck_group(cov).elements]
    return induced_weight_action(ext, autos)


def test_quotient5_deck_action_matrices():
    report = quotient5_action()
    assert len(report.matrices) == 2
    expected = qm(
        [
            [-1, 0, 0, 0, 0],
            [2, 1, 0, 0, 0],
            [2, 0, 1, 0, 0],
            [2, 0, 0, 1, 0],
            [2, 0, 0, 0, 1],
        ]
    )
    mats = set(report.matrices)
    assert mats == {identity(5), expected}
    assert mat_mul(expected, expected) == identity(5)


def test_quotient5_label_lattice_is_standard():
    report = quotient5_action()
    assert report.lattice.denominator == 1
    assert report.lattice.basis == tuple(
        tuple(int(x) for x in row) for row in identity(5)
    )
    assert report.lattice.contains((1, 2, 3, 4, 5))
    assert not report.lattice.contains((1, 0, 0, 0, "1/2"))


def test_induced_action_on_square_symmetry():
    g = square()
    ext = extend_to_gkm_n(g)
    rot = GraphAutomorphism.from_vertex_map(
        g, {"0.0": "1.1", "1.1": "0.0", "0.1": "1.0", "1.0": "0.1"}
    )
    report = induced_weight_action(
        ext, [GraphAutomorphism.identity(g), rot]
    )
    assert report.matrices == (identity(2), identity(2))


def test_induced_action_rejects_label_breaking_automorphism():
    g = square()
    ext = extend_to_gkm_n(g)
    quarter = GraphAutomorphism.from_vertex_map(
        g, {"0.0": "0.1", "0.1": "1.1", "1.1": "1.0", "1.0": "0.0"}
    )
    with pytest.raises(ActionNotCompatible):
        induced_weight_action(ext, [GraphAutomorphism.identity(g), quarter])


def test_induced_action_requires_group_closure():
    report = quotient5_action()
    nontrivial = [
        a for a, m in zip(report.automorphisms, report.matrices)
        if m != identity(5)
    ]
    with pytest.raises(ActionNotCompatible):
        induced_weight_action(report.extension, nontrivial)


# -- lattice helper ----------------------------------------------------------------------


def test_weight_lattice_with_denominators():
    lat = WeightLattice.from_vectors([("1/2", 0), (0, 1)])
    assert lat.denominator == 2
    assert lat.contains(("1/2", 1))
    assert not lat.contains(("1/4", 0))
