"""Equivariant cohomology of GKM graphs over the rationals.

A degree-d equivariant class is one homogeneous degree-d polynomial per
vertex such that the difference across every edge is divisible by the
edge weight.  Small degrees are handled with dense exact linear algebra
(bases of classes); graded dimensions for Betti numbers run through a
sparse integer elimination that never materializes the basis.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from . import linalg
from .errors import FormalityViolation, NoSuchClass, NotCompatible, Verdict
from .faces import Face
from .graph import GkmGraph, GraphAutomorphism, check_automorphism, undirected_id
from .linalg import Q, graded_dim
from .poly import HomogPoly, monomials, restriction_matrix


@dataclass(frozen=True)
class CohomologyClass:
    degree: int
    entries: Mapping[str, HomogPoly]

    def entry(self, v: str) -> HomogPoly:
        return self.entries[v]


def class_vector(g: GkmGraph, cls: CohomologyClass) -> tuple:
    out = []
    for v in g.vertices:
        out.extend(cls.entries[v].coeff_vector())
    return tuple(out)


def class_from_vector(g: GkmGraph, d: int, vec: Sequence) -> CohomologyClass:
    k = g.torus_rank
    size = graded_dim(k, d)
    entries = {}
    for i, v in enumerate(g.vertices):
        block = vec[i * size : (i + 1) * size]
        entries[v] = HomogPoly.from_coeff_vector(k, d, block)
    return CohomologyClass(d, entries)


def constant_class(g: GkmGraph, poly: HomogPoly) -> CohomologyClass:
    return CohomologyClass(poly.degree, {v: poly for v in g.vertices})


def add_classes(c1: CohomologyClass, c2: CohomologyClass) -> CohomologyClass:
    if c1.degree != c2.degree:
        raise ValueError("degrees differ")
    return CohomologyClass(
        c1.degree, {v: c1.entries[v] + c2.entries[v] for v in c1.entries}
    )


def scale_class(c, cls: CohomologyClass) -> CohomologyClass:
    return CohomologyClass(cls.degree, {v: p.scale(c) for v, p in cls.entries.items()})


def multiply_classes(c1: CohomologyClass, c2: CohomologyClass) -> CohomologyClass:
    """Vertexwise product; products of valid classes are valid."""
    return CohomologyClass(
        c1.degree + c2.degree,
        {v: c1.entries[v] * c2.entries[v] for v in c1.entries},
    )


def class_action(
    g: GkmGraph,
    cls: CohomologyClass,
    auto: GraphAutomorphism,
    matrix=None,
) -> CohomologyClass:
    """Push a class through an automorphism.

    The entry at auto(v) is the old entry at v, composed with the
    coefficient action when the automorphism rescales labels by a matrix
    (entries transform by p -> p(M^T x), which sends the linear form u to
    M u).  Validity is preserved when matrix * weight(e) = weight(auto e).
    """
    entries = {}
    transpose = None
    if matrix is not None:
        transpose = [list(row) for row in zip(*matrix)]
    for v, p in cls.entries.items():
        q = p if transpose is None else p.compose_linear(transpose)
        entries[auto.apply_vertex(v)] = q
    return CohomologyClass(cls.degree, entries)


def is_valid_class(g: GkmGraph, cls: CohomologyClass) -> Verdict:
    """Edgewise divisibility of differences by the edge weight."""
    if set(cls.entries) != set(g.vertices):
        return Verdict(False, {"reason": "entries do not match vertices"})
    for uid in g.undirected_ids():
        e = g.edges[uid]
        diff = cls.entries[e.source] - cls.entries[e.target]
        mat = restriction_matrix(g.torus_rank, cls.degree, g.weight_vector(uid))
        vec = diff.coeff_vector()
        for row in mat:
            if linalg.dot(row, vec) != 0:
                return Verdict(False, {"edge": uid})
    return Verdict(True)


def is_zero_class(cls: CohomologyClass) -> bool:
    return all(p.is_zero() for p in cls.entries.values())


# -- dense basis ------------------------------------------------------------


def _unit_vectors(n: int) -> Tuple[tuple, ...]:
    return tuple(
        tuple(Q(1) if j == i else Q(0) for j in range(n)) for i in range(n)
    )


def _dense_edge_rows(g: GkmGraph, d: int) -> List[tuple]:
    k = g.torus_rank
    size = graded_dim(k, d)
    ncols = len(g.vertices) * size
    vindex = {v: i for i, v in enumerate(g.vertices)}
    rows = []
    for uid in g.undirected_ids():
        e = g.edges[uid]
        bu, bw = vindex[e.source] * size, vindex[e.target] * size
        for mrow in restriction_matrix(k, d, g.weight_vector(uid)):
            row = [Q(0)] * ncols
            for j, c in enumerate(mrow):
                if c:
                    row[bu + j] += c
                    row[bw + j] -= c
            rows.append(tuple(row))
    return rows


def equivariant_basis(g: GkmGraph, d: int) -> Tuple[CohomologyClass, ...]:
    """Basis of degree-d classes by dense exact elimination.

    Intended for the small degrees where classes are manipulated directly
    (facet classes, products, ordinary reduction); graded dimensions for
    Betti numbers go through the sparse path instead.
    """
    if d < 0:
        return ()
    rows = _dense_edge_rows(g, d)
    ncols = len(g.vertices) * graded_dim(g.torus_rank, d)
    basis = linalg.nullspace_basis(rows) if rows else _unit_vectors(ncols)
    out = tuple(class_from_vector(g, d, vec) for vec in basis)
    for cls in out:
        verdict = is_valid_class(g, cls)
        if not verdict:
            raise AssertionError("solver returned an invalid class: %s" % (verdict.witness,))
    return out


# -- sparse integer rank ----------------------------------------------------


def _normalized(row: Dict[int, int]) -> Dict[int, int]:
    g0 = 0
    for v in row.values():
        g0 = gcd(g0, v)
    if g0 > 1:
        return {c: v // g0 for c, v in row.items()}
    return row


def sparse_rank(rows: Sequence[Mapping[int, int]]) -> int:
    """Rank of sparse integer rows by fraction-free elimination.

    Pivots favor rare columns, then short rows with small pivot entries;
    combined rows are divided by their gcd to tame growth.
    """
    work: List[Optional[Dict[int, int]]] = []
    for r in rows:
        rr = {c: int(v) for c, v in r.items() if v}
        if rr:
            work.append(_normalized(rr))
    occ: Dict[int, Set[int]] = defaultdict(set)
    for i, r in enumerate(work):
        for c in r:
            occ[c].add(i)
    rank = 0
    while True:
        best = None
        for c, ids in occ.items():
            n = len(ids)
            if n and (best is None or (n, c) < best):
                best = (n, c)
        if best is None:
            break
        c = best[1]
        i0 = min(occ[c], key=lambda i: (len(work[i]), abs(work[i][c]), i))
        pivot = work[i0]
        p = pivot[c]
        rank += 1
        for col in pivot:
            occ[col].discard(i0)
            if not occ[col]:
                del occ[col]
        work[i0] = None
        for i in sorted(occ.get(c, ())):
            row = work[i]
            f = row[c]
            for col in row:
                occ[col].discard(i)
            new: Dict[int, int] = {}
            for col, v in row.items():
                new[col] = v * p
            for col, v in pivot.items():
                w = new.get(col, 0) - v * f
                if w:
                    new[col] = w
                else:
                    new.pop(col, None)
            if new:
                new = _normalized(new)
                work[i] = new
                for col in new:
                    occ[col].add(i)
            else:
                work[i] = None
        occ.pop(c, None)
    return rank


def _sparse_edge_rows(g: GkmGraph, d: int, block_of: Mapping[str, int], size: int):
    """Integer constraint rows; block_of maps vertices to column blocks.

    Vertices sharing a block are constrained to carry equal polynomials,
    which is how invariance under a vertex action is imposed.
    """
    k = g.torus_rank
    rows = []
    for uid in g.undirected_ids():
        e = g.edges[uid]
        bu, bw = block_of[e.source] * size, block_of[e.target] * size
        if bu == bw:
            continue
        for mrow in restriction_matrix(k, d, g.weight_vector(uid)):
            den = 1
            for x in mrow:
                den = lcm(den, x.denominator)
            row: Dict[int, int] = {}
            for j, x in enumerate(mrow):
                if x:
                    v = int(x * den)
                    row[bu + j] = row.get(bu + j, 0) + v
                    row[bw + j] = row.get(bw + j, 0) - v
            row = {cc: vv for cc, vv in row.items() if vv}
            if row:
                rows.append(row)
    return rows


def equivariant_dim(g: GkmGraph, d: int) -> int:
    """Dimension of the degree-d classes (sparse path, no basis)."""
    if d < 0:
        return 0
    size = graded_dim(g.torus_rank, d)
    block_of = {v: i for i, v in enumerate(g.vertices)}
    rows = _sparse_edge_rows(g, d, block_of, size)
    return len(g.vertices) * size - sparse_rank(rows)


# -- Betti numbers ----------------------------------------------------------


@dataclass(frozen=True)
class BettiReport:
    torus_rank: int
    valence: int
    equivariant: Tuple[int, ...]
    betti: Tuple[int, ...]
    total: int
    guard_checked: bool


def _betti_from_dims(g: GkmGraph, dims: Sequence[int], expected_total: int, guard_dim: Optional[int], label: str) -> BettiReport:
    """Free-module recursion: E_d = sum_j b_2j * dim S^(d-j).

    Negative coefficients, a total off the vertex count, or a failing
    guard degree all refute freeness.
    """
    k, n = g.torus_rank, g.valence
    betti: List[int] = []
    for d in range(n + 1):
        acc = dims[d]
        for j in range(d):
            acc -= betti[j] * graded_dim(k, d - j)
        if acc < 0:
            raise FormalityViolation(
                "negative coefficient in the %s recursion" % label,
                {"degree": d, "dims": list(dims[: n + 1])},
            )
        betti.append(acc)
    total = sum(betti)
    if total != expected_total:
        raise FormalityViolation(
            "%s Betti numbers do not sum to the fixed point count" % label,
            {"total": total, "expected": expected_total, "betti": betti},
        )
    guard_checked = False
    if guard_dim is not None:
        predicted = sum(
            betti[j] * graded_dim(k, guard_dim - j) for j in range(n + 1)
        )
        if predicted != dims[guard_dim]:
            raise FormalityViolation(
                "guard degree refutes freeness of the %s module" % label,
                {"degree": guard_dim, "dim": dims[guard_dim], "predicted": predicted},
            )
        guard_checked = True
    return BettiReport(
        k, n, tuple(dims[: n + 1]), tuple(betti), total, guard_checked
    )


def betti_numbers(g: GkmGraph, guard: bool = True) -> BettiReport:
    """Even Betti numbers from equivariant dimensions in degrees 0..n.

    The recursion assumes the equivariant cohomology is a free module over
    the polynomial ring; the degree n+1 guard re-checks that assumption
    beyond the degrees used.
    """
    n = g.valence
    top = n + 1 if guard else n
    dims = [equivariant_dim(g, d) for d in range(top + 1)]
    return _betti_from_dims(
        g, dims, len(g.vertices), n + 1 if guard else None, "equivariant"
    )


# -- invariants under automorphisms -----------------------------------------


def _vertex_orbit_blocks(g: GkmGraph, autos: Sequence[GraphAutomorphism]):
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for auto in autos:
        for v, w in auto.vertex_map.items():
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[max(rv, rw)] = min(rv, rw)
    reps = sorted({find(v) for v in g.vertices})
    index = {r: i for i, r in enumerate(reps)}
    return {v: index[find(v)] for v in g.vertices}, len(reps)


def invariant_equivariant_dim(
    g: GkmGraph, autos: Sequence[GraphAutomorphism], d: int
) -> int:
    """Dimension of degree-d classes fixed by automorphisms acting by
    vertex permutation (trivial action on coefficients)."""
    if d < 0:
        return 0
    size = graded_dim(g.torus_rank, d)
    block_of, nblocks = _vertex_orbit_blocks(g, autos)
    rows = _sparse_edge_rows(g, d, block_of, size)
    return nblocks * size - sparse_rank(rows)


def invariant_betti(
    g: GkmGraph, autos: Sequence[GraphAutomorphism], guard: bool = True
) -> BettiReport:
    """Betti numbers of the invariant part under a vertex action.

    The automorphisms must preserve weights (checked); they act trivially
    on polynomial coefficients, so invariant classes are classes constant
    on vertex orbits and the free-module recursion applies unchanged.
    """
    for auto in autos:
        verdict = check_automorphism(g, auto)
        if not verdict:
            raise NotCompatible(
                "automorphism does not preserve the graph", verdict.witness
            )
    n = g.valence
    top = n + 1 if guard else n
    dims = [invariant_equivariant_dim(g, autos, d) for d in range(top + 1)]
    block_of, nblocks = _vertex_orbit_blocks(g, autos)
    return _betti_from_dims(g, dims, nblocks, n + 1 if guard else None, "invariant")


# -- facet classes and the ordinary reduction --------------------------------


def facet_class(g: GkmGraph, face: Face) -> CohomologyClass:
    """The degree-1 class supported off a codimension-one face.

    Unique up to scale; normalized so the entry at the smallest face
    vertex is the canonical lift of its normal edge weight.
    """
    if face.dim != g.valence - 1:
        raise NoSuchClass("face is not a facet", {"dim": face.dim})
    k = g.torus_rank
    inside = set(face.vertices)
    fverts = sorted(inside)
    col_of = {v: i * k for i, v in enumerate(fverts)}
    ncols = len(fverts) * k
    rows = []
    for uid in g.undirected_ids():
        e = g.edges[uid]
        su, sw = e.source in inside, e.target in inside
        if not (su or sw):
            continue
        mat = restriction_matrix(k, 1, g.weight_vector(uid))
        for mrow in mat:
            row = [Q(0)] * ncols
            if su:
                for j, c in enumerate(mrow):
                    row[col_of[e.source] + j] += c
            if sw:
                for j, c in enumerate(mrow):
                    row[col_of[e.target] + j] -= c
            if any(row):
                rows.append(tuple(row))
    basis = linalg.nullspace_basis(rows) if rows else _unit_vectors(ncols)
    if len(basis) != 1:
        raise NoSuchClass(
            "facet class is not one-dimensional",
            {"dimension": len(basis), "face": list(face.vertices)},
        )
    sol = basis[0]
    v0 = fverts[0]
    inside_edges = set(face.undirected)
    normal = [
        e for e in g.star(v0) if undirected_id(e) not in inside_edges
    ]
    if len(normal) != 1:
        raise NoSuchClass("face has no unique normal direction", {"vertex": v0})
    target = g.weight_vector(normal[0])
    value = sol[col_of[v0] : col_of[v0] + k]
    scale = None
    for a, b in zip(value, target):
        if b != 0:
            scale = a / b
            break
    if not scale:
        raise NoSuchClass("facet class vanishes at its base vertex", {"vertex": v0})
    entries = {}
    zero = HomogPoly.zero(k, 1)
    for v in g.vertices:
        if v in inside:
            coeffs = [x / scale for x in sol[col_of[v] : col_of[v] + k]]
            entries[v] = HomogPoly.from_coeff_vector(k, 1, coeffs)
        else:
            entries[v] = zero
    return CohomologyClass(1, entries)


def ordinary_zero_check(g: GkmGraph, cls: CohomologyClass) -> bool:
    """Is the class in the ideal generated by positive-degree constants?

    Equivalently: does it map to zero in ordinary cohomology?  Tests
    membership in the span of (linear form) * (degree d-1 classes).
    """
    if is_zero_class(cls):
        return True
    d = cls.degree
    if d == 0:
        return False
    k = g.torus_rank
    gens = []
    for gamma in equivariant_basis(g, d - 1):
        for i in range(k):
            xi = HomogPoly.variable(k, i)
            shifted = CohomologyClass(
                d, {v: p * xi for v, p in gamma.entries.items()}
            )
            gens.append(class_vector(g, shifted))
    return linalg.solve_in_span(class_vector(g, cls), gens) is not None


def facet_orbit_bound(
    g: GkmGraph,
    autos: Sequence[GraphAutomorphism],
    facets: Sequence[Tuple[frozenset, frozenset]],
) -> int:
    """Facet orbit count minus the invariant second Betti number.

    facets are (vertex set, undirected edge set) pairs; automorphisms act
    on both coordinates.
    """
    keys = [
        (frozenset(verts), frozenset(edges)) for verts, edges in facets
    ]
    index = {f: i for i, f in enumerate(keys)}
    parent = list(range(len(keys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for auto in autos:
        for f, i in index.items():
            verts, edges = f
            image = (
                frozenset(auto.vertex_map[v] for v in verts),
                frozenset(_undirected_image(auto, e) for e in edges),
            )
            j = index.get(image)
            if j is None:
                raise ValueError("automorphism does not permute the facets")
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    orbits = len({find(i) for i in range(len(keys))})
    b2 = invariant_betti(g, autos, guard=False).betti[1]
    return orbits - b2


def _undirected_image(auto: GraphAutomorphism, uid: str) -> str:
    image = auto.edge_map[uid]
    return image[:-1] if image.endswith("~") else image
