"""Exact combinatorial toolkit for GKM graphs.

Validation of labelled graphs with connections, face classification,
graph coverings and deck groups, extension of axial functions, exact
rational equivariant cohomology, sign lifts, and an end-to-end model
pipeline.
"""

from .acs import AcsLift, find_acs_lift, quasitoric_sign_check, recognize_bott
from .cohomology import (
    BettiReport,
    CohomologyClass,
    betti_numbers,
    equivariant_basis,
    equivariant_dim,
    facet_class,
    invariant_betti,
    multiply_classes,
    ordinary_zero_check,
)
from .covering import (
    CoveringMap,
    DeckGroup,
    Factor,
    build_covering,
    deck_group,
    pull_back_labels,
    quotient_graph,
    vertex_count_gap,
)
from .extension import ExtensionResult, extend_to_gkm_n, induced_weight_action
from .faces import check_small_three_faces, classify_two_face, enumerate_faces
from .graph import GkmGraph, Weight, gkm_order, validate_structure
from .models import (
    BottStage,
    bott_tower_cohomology,
    hirzebruch_model,
    hypercube_involution_model,
    sigma_model,
    simplex_model,
    standard_product_model,
    weighted_projective_model,
)
from .pipeline import build_model, classify_orbit_space

__all__ = [
    "AcsLift",
    "BettiReport",
    "BottStage",
    "CohomologyClass",
    "CoveringMap",
    "DeckGroup",
    "ExtensionResult",
    "Factor",
    "GkmGraph",
    "Weight",
    "betti_numbers",
    "bott_tower_cohomology",
    "build_covering",
    "build_model",
    "check_small_three_faces",
    "classify_orbit_space",
    "classify_two_face",
    "deck_group",
    "enumerate_faces",
    "equivariant_basis",
    "equivariant_dim",
    "extend_to_gkm_n",
    "facet_class",
    "find_acs_lift",
    "gkm_order",
    "hirzebruch_model",
    "hypercube_involution_model",
    "induced_weight_action",
    "invariant_betti",
    "multiply_classes",
    "ordinary_zero_check",
    "pull_back_labels",
    "quasitoric_sign_check",
    "quotient_graph",
    "recognize_bott",
    "sigma_model",
    "simplex_model",
    "standard_product_model",
    "validate_structure",
    "vertex_count_gap",
    "weighted_projective_model",
]
__version__ = "0.1.0"
