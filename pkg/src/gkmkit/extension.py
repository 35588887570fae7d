"""Extension of labels on a product of simplices to full rank.

Starting from a basis assigned to the star of a base vertex, labels are
transported along edges using the unique (p, q) coefficients of the
rank-k labels.  When the graph is a product of simplices the transport is
path-independent and yields a rank-n labelling together with a projection
onto the original labels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .covering import build_covering
from .errors import (
    ActionNotCompatible,
    DependentLabels,
    InconsistentHolonomy,
    NotProductOfSimplices,
)
from .graph import (
    GkmGraph,
    GraphAutomorphism,
    Weight,
    check_automorphism,
    check_gkm_k,
    connection_pq,
)
from .linalg import Q


def transport_weights(g: GkmGraph, along: str, values: Mapping[str, tuple]) -> Dict[str, tuple]:
    """Transport one value per star edge along a directed edge.

    The traversed edge keeps its value (its own relation only fixes
    p + q = 1); every other edge follows the unique (p, q) of the
    canonical lifts.
    """
    src = g.edges[along].source
    star = g.star(src)
    if set(values) != set(star):
        raise ValueError("values must cover the star of the source")
    nabla = g.nabla(along)
    out: Dict[str, tuple] = {}
    for f in star:
        if f == along:
            out[nabla[f]] = tuple(values[f])
            continue
        pq = connection_pq(g, along, f)
        if pq is None:
            raise InconsistentHolonomy(
                "image weight outside the span of its pair",
                {"along": along, "edge": f},
            )
        p, q = pq
        out[nabla[f]] = linalg.vec_add(
            linalg.vec_scale(p, values[f]), linalg.vec_scale(q, values[along])
        )
    return out


@dataclass
class ExtensionResult:
    """A rank-n labelling beta with projection phi onto the input labels.

    beta maps directed edges to vectors; both directions of an edge carry
    the same vector, mirroring the canonical lifts of the input weights.
    phi is a k x n matrix with phi . beta = alpha exactly.
    """

    graph: GkmGraph
    base_vertex: str
    basis_edges: Tuple[str, ...]
    beta: Dict[str, tuple]
    phi: tuple

    @property
    def valence(self) -> int:
        return self.graph.valence

    def extended_graph(self) -> GkmGraph:
        weights = {
            uid: Weight(self.beta[uid]) for uid in self.graph.undirected_ids()
        }
        return self.graph.with_weights(self.graph.valence, weights)


def extend_to_gkm_n(g: GkmGraph, base_vertex: Optional[str] = None) -> ExtensionResult:
    """Extend the labels of a product of simplices to independent rank n.

    Requires pairwise independent weights and a trivial covering (extend
    the pulled-back labels of the covering otherwise).  Transport around
    every cycle is re-verified; disagreement raises InconsistentHolonomy.
    """
    if not check_gkm_k(g, 2):
        raise DependentLabels(
            "extension needs pairwise independent weights", None
        )
    cov = build_covering(g, base_vertex)
    if not cov.is_identity:
        raise NotProductOfSimplices(
            "graph is covered nontrivially; extend the pulled-back labels",
            {"degree": cov.degree},
        )
    base = cov.base_vertex
    n = g.valence
    star0 = g.star(base)

    def unit(i):
        return tuple(Q(1) if j == i else Q(0) for j in range(n))

    assigned: Dict[str, Dict[str, tuple]] = {
        base: {e: unit(i) for i, e in enumerate(star0)}
    }
    queue = deque([base])
    while queue:
        v = queue.popleft()
        vals = assigned[v]
        for e in g.star(v):
            out = transport_weights(g, e, vals)
            w = g.edges[e].target
            if w not in assigned:
                assigned[w] = out
                queue.append(w)
            elif assigned[w] != out:
                bad = sorted(f for f in out if assigned[w][f] != out[f])
                raise InconsistentHolonomy(
                    "transported labels disagree around a cycle",
                    {
                        "via": e,
                        "edges": bad,
                        "expected": [linalg.vec_to_strs(out[f]) for f in bad],
                        "assigned": [linalg.vec_to_strs(assigned[w][f]) for f in bad],
                    },
                )

    for v, vals in assigned.items():
        if linalg.rank(list(vals.values())) != n:
            raise InconsistentHolonomy(
                "extended labels are dependent at a vertex", {"vertex": v}
            )

    beta = {e: vals[e] for vals in assigned.values() for e in vals}
    phi = linalg.transpose([g.weight_vector(e) for e in star0])
    for e in sorted(beta):
        if linalg.mat_vec(phi, beta[e]) != g.weight_vector(e):
            raise InconsistentHolonomy(
                "projection does not recover the input labels", {"edge": e}
            )
    return ExtensionResult(g, base, star0, beta, phi)


@dataclass(frozen=True)
class WeightLattice:
    """Integer span of scaled label vectors: basis rows are a Hermite basis
    of denominator * vectors."""

    denominator: int
    basis: tuple

    @classmethod
    def from_vectors(cls, vectors: Sequence[tuple]) -> "WeightLattice":
        den = 1
        for v in vectors:
            for x in v:
                den = lcm(den, Q(x).denominator)
        scaled = [[int(Q(x) * den) for x in v] for v in vectors]
        return cls(den, linalg.hermite_basis(scaled))

    def contains(self, v: Sequence) -> bool:
        scaled = [Q(x) * self.denominator for x in v]
        if any(x.denominator != 1 for x in scaled):
            return False
        return linalg.in_lattice(self.basis, [int(x) for x in scaled])


@dataclass
class ActionReport:
    """Matrices realizing automorphisms on the extended labels."""

    extension: ExtensionResult
    automorphisms: Tuple[GraphAutomorphism, ...]
    matrices: Tuple[tuple, ...]
    lattice: WeightLattice


def induced_weight_action(
    ext: ExtensionResult, autos: Sequence[GraphAutomorphism]
) -> ActionReport:
    """The linear action of label-preserving automorphisms on the extension.

    Each matrix sends the base-star basis to the beta-values of the image
    edges; this is forced by requiring phi . A = phi.  The matrices must
    carry every extended label to the image label up to sign, form a group
    homomorphism, and preserve the lattice spanned by the labels.
    """
    g = ext.graph
    autos = tuple(autos)
    matrices: List[tuple] = []
    for auto in autos:
        verdict = check_automorphism(g, auto)
        if not verdict:
            raise ActionNotCompatible(
                "automorphism does not preserve the labels", verdict.witness
            )
        a = linalg.transpose([ext.beta[auto.edge_map[e]] for e in ext.basis_edges])
        for e in sorted(ext.beta):
            image = linalg.mat_vec(a, ext.beta[e])
            if Weight(image) != Weight(ext.beta[auto.edge_map[e]]):
                raise ActionNotCompatible(
                    "matrix does not carry extended labels to labels",
                    {"edge": e},
                )
        if linalg.mat_mul(ext.phi, a) != ext.phi:
            raise ActionNotCompatible(
                "action does not fix the projection", None
            )
        matrices.append(a)

    lookup = {}
    for auto, mat in zip(autos, matrices):
        lookup[tuple(sorted(auto.edge_map.items()))] = mat
    for a, ma in zip(autos, matrices):
        for b, mb in zip(autos, matrices):
            c = a.compose(b, g)
            mc = lookup.get(tuple(sorted(c.edge_map.items())))
            if mc is None:
                raise ActionNotCompatible(
                    "automorphisms are not closed under composition", None
                )
            if linalg.mat_mul(ma, mb) != mc:
                raise ActionNotCompatible(
                    "matrices do not compose like the automorphisms", None
                )

    lattice = WeightLattice.from_vectors(
        [ext.beta[uid] for uid in g.undirected_ids()]
    )
    for auto, mat in zip(autos, matrices):
        for mats in (mat, linalg.invert(mat)):
            for row in lattice.basis:
                vec = [Fraction(x, lattice.denominator) for x in row]
                if not lattice.contains(linalg.mat_vec(mats, vec)):
                    raise ActionNotCompatible(
                        "action does not preserve the label lattice", None
                    )
    return ActionReport(ext, autos, tuple(matrices), lattice)
