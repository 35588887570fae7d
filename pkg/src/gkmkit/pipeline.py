"""End-to-end runs: model construction over a covering, and the
product-or-quotient classification of an orbit space graph.

Every stage failure is wrapped in PipelineError with the stage name so a
failing input pinpoints which hypothesis broke.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from . import linalg
from .acs import AcsSearch, find_acs_lift
from .cohomology import (
    BettiReport,
    betti_numbers,
    facet_orbit_bound,
    invariant_betti,
)
from .covering import (
    CoveringMap,
    DeckGroup,
    ProductFacet,
    PulledBack,
    build_covering,
    deck_group,
    enumerate_product_facets,
    pull_back_labels,
)
from .errors import FormalityViolation, GkmError, PipelineError
from .extension import ActionReport, ExtensionResult, extend_to_gkm_n, induced_weight_action
from .faces import OTHER, check_small_three_faces, classify_two_face, enumerate_faces
from .graph import GkmGraph, Weight, check_effective, gkm_order


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except GkmError as exc:
        raise PipelineError(name, exc) from exc


@dataclass(frozen=True)
class ModelReport:
    factors: Tuple[Tuple[str, int], ...]
    degree: int
    deck_order: int
    betti: BettiReport
    invariant: BettiReport
    facet_labels: Dict[str, tuple]
    torus_bound: int
    covering: CoveringMap
    deck: DeckGroup
    pulled: PulledBack
    extension: ExtensionResult
    action: ActionReport


def _facet_key(pf: ProductFacet) -> str:
    return "%d.%d" % (pf.factor, pf.index)


def _transverse_move(pf: ProductFacet) -> int:
    # delta facet j is crossed by moves to coordinate j; sigma facet p by
    # moves of parallel class p.  Both are encoded as the facet index.
    return pf.index


def _facet_label(
    cov: CoveringMap, pulled: PulledBack, ext: ExtensionResult, pf: ProductFacet
) -> tuple:
    """Label of a product facet, read off the extended weights.

    At any facet vertex the incident facet labels are the rows of the
    inverse of the matrix whose columns are the extended weights of the
    star, ordered so row r pairs with the facet transverse to star edge
    r.  Computed at the smallest facet vertex; the label is canonicalized
    since its global sign is a free choice.
    """
    product = cov.product
    pv = min(pf.vertices)
    star = product.star(pv)
    columns = []
    for pe in star:
        token = pulled.edge_token[product.undirected(pe)]
        columns.append(ext.beta[token])
    inverse = linalg.invert(tuple(zip(*columns)))
    move = _transverse_move(pf)
    row = None
    for r, pe in enumerate(star):
        if pe[1] == pf.factor and pe[2] == move:
            row = inverse[r]
            break
    if row is None:
        raise AssertionError("facet has no transverse edge at %r" % (pv,))
    return Weight(row).vector


def build_model(g: GkmGraph) -> ModelReport:
    """Covering, extension, deck action, and the Betti agreement check.

    The direct Betti numbers of the input must match the deck-invariant
    Betti numbers computed upstairs on the pulled-back labels; the report
    also carries the facet labels of the product and the symmetry bound.
    """
    verdict = check_small_three_faces(g)
    if not verdict:
        raise PipelineError(
            "small_three_faces",
            GkmError("three-face types outside the allowed list", verdict.witness),
        )
    order = min(4, g.valence)
    if gkm_order(g) < order:
        raise PipelineError(
            "labels",
            GkmError(
                "labels are not generic enough",
                {"required": order, "found": gkm_order(g)},
            ),
        )
    effective = check_effective(g)
    if not effective:
        raise PipelineError(
            "labels", GkmError("labels are not effective", effective.witness)
        )
    cov = _stage("covering", build_covering, g)
    pulled = _stage("pull_back", pull_back_labels, cov)
    ext = _stage("extension", extend_to_gkm_n, pulled.graph)
    deck = _stage("deck_group", deck_group, cov)
    autos = [pulled.automorphism(el) for el in deck.elements]
    action = _stage("action", induced_weight_action, ext, autos)
    invariant = _stage("invariant_betti", invariant_betti, pulled.graph, autos)
    direct = _stage("betti", betti_numbers, g)
    if direct.betti != invariant.betti:
        raise PipelineError(
            "agreement",
            FormalityViolation(
                "graph and model Betti numbers disagree",
                {"graph": list(direct.betti), "model": list(invariant.betti)},
            ),
        )
    facets = list(enumerate_product_facets(cov.product))
    labels = {}
    for pf in facets:
        labels[_facet_key(pf)] = _stage("facet_labels", _facet_label, cov, pulled, ext, pf)
    keys = [
        (
            frozenset(pulled.vertex_token[v] for v in pf.vertices),
            frozenset(pulled.edge_token[e] for e in pf.undirected),
        )
        for pf in facets
    ]
    bound = _stage("torus_bound", facet_orbit_bound, pulled.graph, autos, keys)
    return ModelReport(
        factors=tuple((f.kind, f.size) for f in cov.factors),
        degree=cov.degree,
        deck_order=deck.order,
        betti=direct,
        invariant=invariant,
        facet_labels=labels,
        torus_bound=bound,
        covering=cov,
        deck=deck,
        pulled=pulled,
        extension=ext,
        action=action,
    )


@dataclass(frozen=True)
class ClassifyReport:
    kind: str
    factors: Tuple[Tuple[str, int], ...]
    deck_order: int
    antipodal_hypercube: bool


def classify_orbit_space(g: GkmGraph) -> ClassifyReport:
    """Product-of-simplices or nontrivial quotient.

    Requires every two-dimensional face to be a biangle, triangle or
    square.  A trivial deck group certifies the product structure; a
    nontrivial one is reported together with whether it is the free
    antipodal action on a hypercube, the one case a free action on the
    facets allows.
    """
    for face in enumerate_faces(g, 2):
        if classify_two_face(g, face) == OTHER:
            raise PipelineError(
                "two_faces",
                GkmError(
                    "two-dimensional face with more than four vertices",
                    {"vertices": list(face.vertices)},
                ),
            )
    cov = _stage("covering", build_covering, g)
    deck = _stage("deck_group", deck_group, cov)
    factors = tuple((f.kind, f.size) for f in cov.factors)
    if deck.is_trivial:
        return ClassifyReport("product", factors, 1, False)
    free_on_facets = True
    for pf in enumerate_product_facets(cov.product):
        inside = set(pf.vertices)
        for el in deck.elements:
            if el.is_identity:
                continue
            if any(el.vertex_map[v] in inside for v in pf.vertices):
                free_on_facets = False
                break
        if not free_on_facets:
            break
    antipodal = (
        free_on_facets
        and deck.order == 2
        and all(f.kind == "delta" and f.size == 1 for f in cov.factors)
    )
    return ClassifyReport("nontrivial_cover", factors, deck.order, antipodal)


def torus_upper_bound(pulled: PulledBack, deck: DeckGroup) -> int:
    """Deck orbit count on product facets minus the invariant second
    Betti number of the pulled-back labels."""
    autos = [pulled.automorphism(el) for el in deck.elements]
    keys = [
        (
            frozenset(pulled.vertex_token[v] for v in pf.vertices),
            frozenset(pulled.edge_token[e] for e in pf.undirected),
        )
        for pf in enumerate_product_facets(deck.covering.product)
    ]
    return facet_orbit_bound(pulled.graph, autos, keys)
