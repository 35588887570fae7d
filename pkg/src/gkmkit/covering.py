"""Coverings by products of simplices, deck groups, quotients.

Any connected graph with a connection whose 2-faces have at most four
vertices and whose 3-faces are among the five small types is covered by a
product of simplex graphs carrying the translation connection.  The
covering is built by propagating a star bijection from a base vertex; the
deck transformations are built by the same propagation inside the product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import (
    NotCompatible,
    NotFree,
    NotGalois,
    NotProductOfSimplices,
    WellDefinednessFailure,
)
from .graph import (
    GkmGraph,
    GraphAutomorphism,
    Weight,
    check_automorphism,
    generate_group,
    reverse_id,
    undirected_id,
)
from .faces import check_connection_identities, maximal_simplex_partition


@dataclass(frozen=True)
class Factor:
    """One simplex factor: a delta of dimension size, or a sigma with size
    parallel classes."""

    kind: str
    size: int


class ProductGraph:
    """Product of simplex factors with the translation connection.

    Vertices are coordinate tuples; a delta factor of size m contributes a
    coordinate in 0..m, a sigma factor a coordinate in {0, 1}.  A directed
    edge is (vertex, factor index, move) where the move is the target
    coordinate for delta factors and the parallel-class index (1..m) for
    sigma factors.  Moves are untouched by transport, which makes the
    connection a one-line rule.
    """

    def __init__(self, factors: Sequence[Factor]):
        self.factors = tuple(factors)
        for f in self.factors:
            if f.kind == "delta":
                if f.size < 1:
                    raise ValueError("delta factor needs size >= 1")
            elif f.kind == "sigma":
                if f.size < 2:
                    raise ValueError("sigma factor needs size >= 2")
            else:
                raise ValueError("unknown factor kind %r" % f.kind)
        ranges = [
            range(f.size + 1) if f.kind == "delta" else range(2)
            for f in self.factors
        ]
        self.vertices: Tuple[tuple, ...] = tuple(sorted(iproduct(*ranges)))

    @property
    def valence(self) -> int:
        return sum(f.size for f in self.factors)

    @property
    def base_point(self) -> tuple:
        return (0,) * len(self.factors)

    def star(self, v: tuple) -> Tuple[tuple, ...]:
        edges = []
        for i, f in enumerate(self.factors):
            if f.kind == "delta":
                edges.extend((v, i, m) for m in range(f.size + 1) if m != v[i])
            else:
                edges.extend((v, i, p) for p in range(1, f.size + 1))
        return tuple(edges)

    def target(self, e: tuple) -> tuple:
        v, i, m = e
        if self.factors[i].kind == "delta":
            return v[:i] + (m,) + v[i + 1 :]
        return v[:i] + (1 - v[i],) + v[i + 1 :]

    def reverse(self, e: tuple) -> tuple:
        v, i, m = e
        t = self.target(e)
        if self.factors[i].kind == "delta":
            return (t, i, v[i])
        return (t, i, m)

    def nabla_edge(self, e: tuple, f: tuple) -> tuple:
        """Transport of f (at the source of e) along e: keep the move."""
        if f == e:
            return self.reverse(e)
        _, j, fm = f
        return (self.target(e), j, fm)

    def undirected(self, e: tuple) -> tuple:
        return min(e, self.reverse(e))

    def directed_edges(self):
        for v in self.vertices:
            yield from self.star(v)

    def undirected_edges(self) -> Tuple[tuple, ...]:
        return tuple(sorted({self.undirected(e) for e in self.directed_edges()}))

    def vertex_token(self, v: tuple) -> str:
        return ".".join(str(c) for c in v)

    def edge_token(self, e: tuple) -> str:
        e0 = self.undirected(e)
        v, i, m = e0
        tok = "%s|%d.%d" % (self.vertex_token(v), i, m)
        return tok if e == e0 else tok + "~"


@dataclass(frozen=True)
class ProductFacet:
    """A codimension-one face of a product graph."""

    factor: int
    index: int
    vertices: frozenset
    undirected: frozenset


def enumerate_product_facets(p: ProductGraph) -> Tuple[ProductFacet, ...]:
    """All facets: omit one vertex label of a delta factor, or one parallel
    class of a sigma factor."""
    facets = []
    for i, f in enumerate(p.factors):
        if f.kind == "delta":
            for j in range(f.size + 1):
                verts = frozenset(v for v in p.vertices if v[i] != j)
                edges = frozenset(
                    e
                    for e in p.undirected_edges()
                    if e[0] in verts and p.target(e) in verts
                    and not (e[1] == i and e[2] == j)
                )
                facets.append(ProductFacet(i, j, verts, edges))
        else:
            for q in range(1, f.size + 1):
                verts = frozenset(p.vertices)
                edges = frozenset(
                    e for e in p.undirected_edges() if not (e[1] == i and e[2] == q)
                )
                facets.append(ProductFacet(i, q, verts, edges))
    return tuple(facets)


def build_product_graph(factors: Sequence[Factor]) -> ProductGraph:
    return ProductGraph(factors)


class _View:
    """Uniform star/target/transport interface over graphs and products."""

    __slots__ = ("star", "target", "nabla")

    def __init__(self, obj):
        if isinstance(obj, GkmGraph):
            self.star = obj.star
            self.target = lambda e: obj.edges[e].target
            self.nabla = lambda e, f: obj.nabla(e)[f]
        else:
            self.star = obj.star
            self.target = obj.target
            self.nabla = obj.nabla_edge


def _propagate(src: _View, dst: _View, v0, w0, seed: Mapping):
    """Extend a star bijection at v0 to a connection map on the component.

    Breadth-first; on revisits the recomputed star map must agree with the
    stored one, else the seed admits no extension.
    """
    vertex_map = {v0: w0}
    star_maps = {v0: dict(seed)}
    queue = deque([v0])
    while queue:
        y = queue.popleft()
        m = star_maps[y]
        for e in src.star(y):
            img = m[e]
            t_src, t_dst = src.target(e), dst.target(img)
            new = {src.nabla(e, f): dst.nabla(img, m[f]) for f in src.star(y)}
            if t_src not in vertex_map:
                vertex_map[t_src] = t_dst
                star_maps[t_src] = new
                queue.append(t_src)
            elif vertex_map[t_src] != t_dst or star_maps[t_src] != new:
                raise WellDefinednessFailure(
                    "propagated star maps disagree",
                    {"at": str(t_src), "via": str(e)},
                )
    return vertex_map, star_maps


@dataclass
class CoveringMap:
    """A covering of a graph by a product of simplices.

    vertex_map and edge_map send product vertices and directed product
    edges to their images; star_maps holds the local star bijections.
    """

    base: GkmGraph
    product: ProductGraph
    base_vertex: str
    vertex_map: Dict[tuple, str]
    edge_map: Dict[tuple, str]
    star_maps: Dict[tuple, Dict[tuple, str]]

    @property
    def factors(self) -> Tuple[Factor, ...]:
        return self.product.factors

    @property
    def degree(self) -> int:
        return len(self.product.vertices) // len(self.base.vertices)

    @property
    def is_identity(self) -> bool:
        return len(self.product.vertices) == len(self.base.vertices)

    def fiber(self, v: str) -> Tuple[tuple, ...]:
        return tuple(y for y in self.product.vertices if self.vertex_map[y] == v)


def build_covering(g: GkmGraph, base_vertex: Optional[str] = None) -> CoveringMap:
    """Cover g by a product of simplices.

    Factors come from the maximal simplex partition at the base vertex,
    delta factors first, then sigma, by decreasing size.  The covering
    exists whenever every edge pair spans a biangle, triangle or square
    and the connection satisfies the biangle and square identities; these
    preconditions are checked and reported as NotProductOfSimplices.
    Small 3-faces are not required (quotients of hypercubes have
    three-dimensional faces outside the five listed types).
    """
    if not g.has_connection():
        raise ValueError("covering needs a connection")
    identities = check_connection_identities(g)
    if not identities:
        raise NotProductOfSimplices(
            "2-face or connection identity check failed", identities.witness
        )
    base = base_vertex if base_vertex is not None else g.vertices[0]
    blocks = maximal_simplex_partition(g, base)
    product = ProductGraph([Factor(b.kind, b.size) for b in blocks])
    x0 = product.base_point
    seed = {}
    for i, block in enumerate(blocks):
        for m, eid in enumerate(block.edges, start=1):
            seed[(x0, i, m)] = eid
    vertex_map, star_maps = _propagate(_View(product), _View(g), x0, base, seed)

    if set(vertex_map.values()) != set(g.vertices):
        raise WellDefinednessFailure("covering misses vertices", None)
    sizes = {v: 0 for v in g.vertices}
    for y in product.vertices:
        sizes[vertex_map[y]] += 1
    if len(set(sizes.values())) != 1:
        raise WellDefinednessFailure("fibers are not uniform", sizes)

    edge_map = {
        e: star_maps[y][e] for y in product.vertices for e in product.star(y)
    }
    return CoveringMap(g, product, base, vertex_map, edge_map, star_maps)


@dataclass(frozen=True)
class DeckElement:
    """An automorphism of the covering product commuting with projection."""

    vertex_map: Mapping[tuple, tuple]
    edge_map: Mapping[tuple, tuple]

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self.vertex_map.items())

    def _key(self):
        return tuple(sorted(self.vertex_map.items()))

    def __eq__(self, other):
        return isinstance(other, DeckElement) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def compose(self, other: "DeckElement") -> "DeckElement":
        return DeckElement(
            {v: self.vertex_map[w] for v, w in other.vertex_map.items()},
            {e: self.edge_map[f] for e, f in other.edge_map.items()},
        )


@dataclass
class DeckGroup:
    covering: CoveringMap
    elements: Tuple[DeckElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1


def deck_group(cov: CoveringMap) -> DeckGroup:
    """Deck transformations of the covering, verified simply transitive.

    One element per fiber point over the base vertex, obtained by
    propagating the star bijection that matches the two local projections.
    """
    product = cov.product
    view = _View(product)
    x0 = product.base_point
    elements: List[DeckElement] = []
    for y in cov.fiber(cov.base_vertex):
        inv_y = {img: e for e, img in cov.star_maps[y].items()}
        seed = {e: inv_y[cov.edge_map[e]] for e in product.star(x0)}
        try:
            vmap, smaps = _propagate(view, view, x0, y, seed)
        except WellDefinednessFailure as exc:
            raise NotGalois("deck element does not extend", exc.witness)
        emap = {e: smaps[v][e] for v in product.vertices for e in product.star(v)}
        elements.append(DeckElement(vmap, emap))

    for psi in elements:
        for e in product.directed_edges():
            if cov.edge_map[psi.edge_map[e]] != cov.edge_map[e]:
                raise NotGalois(
                    "deck element does not commute with projection",
                    {"edge": str(e)},
                )

    by_base = {psi.vertex_map[x0]: psi for psi in elements}
    for a in elements:
        for b in elements:
            c = a.compose(b)
            known = by_base.get(c.vertex_map[x0])
            if known is None or known != c:
                raise NotGalois("deck transformations do not form a group", None)

    for v in cov.base.vertices:
        fiber = cov.fiber(v)
        for a in fiber:
            for b in fiber:
                hits = [psi for psi in elements if psi.vertex_map[a] == b]
                if len(hits) != 1:
                    raise NotGalois(
                        "deck group is not simply transitive",
                        {"vertex": v, "from": str(a), "to": str(b), "count": len(hits)},
                    )

    elements.sort(key=lambda psi: psi.vertex_map[x0])
    return DeckGroup(cov, tuple(elements))


@dataclass
class PulledBack:
    """The covering product as a labelled graph, with translation maps."""

    graph: GkmGraph
    vertex_token: Dict[tuple, str]
    edge_token: Dict[tuple, str]
    token_vertex: Dict[str, tuple]
    token_edge: Dict[str, tuple]

    def automorphism(self, deck: DeckElement) -> GraphAutomorphism:
        return GraphAutomorphism(
            self.graph,
            {
                self.edge_token[e]: self.edge_token[deck.edge_map[e]]
                for e in self.edge_token
            },
        )


def pull_back_labels(cov: CoveringMap) -> PulledBack:
    """Label the covering product with the pulled-back weights.

    Vertex tokens are the coordinate tuples joined by dots; edge tokens
    name the canonical orientation.  The connection is the translation
    connection of the product.
    """
    product = cov.product
    g = cov.base
    vtok = {v: product.vertex_token(v) for v in product.vertices}
    etok = {e: product.edge_token(e) for e in product.directed_edges()}

    specs = []
    for e0 in product.undirected_edges():
        uid = product.edge_token(e0)
        specs.append(
            (uid, vtok[e0[0]], vtok[product.target(e0)], g.weight(cov.edge_map[e0]))
        )
    connection = {}
    for e in product.directed_edges():
        connection[etok[e]] = {
            etok[f]: etok[product.nabla_edge(e, f)] for f in product.star(e[0])
        }
    graph = GkmGraph.build(g.torus_rank, specs, connection)
    return PulledBack(
        graph,
        vtok,
        etok,
        {t: v for v, t in vtok.items()},
        {t: e for e, t in etok.items()},
    )


@dataclass
class QuotientResult:
    graph: GkmGraph
    vertex_projection: Dict[str, str]
    edge_projection: Dict[str, str]
    group: Tuple[GraphAutomorphism, ...]


def quotient_graph(g: GkmGraph, generators: Sequence[GraphAutomorphism]) -> QuotientResult:
    """Quotient of g by the group generated by label-preserving automorphisms.

    The action must be free on vertices and may not send any edge to its
    own reverse.  Orbit representatives (lexicographic minima) name the
    quotient vertices and edges, so quotient tokens are tokens of g.
    """
    for auto in generators:
        verdict = check_automorphism(g, auto)
        if not verdict:
            raise NotCompatible("generator is not label-preserving", verdict.witness)
    group = generate_group(g, generators)

    for auto in group:
        if auto.is_identity:
            continue
        fixed = sorted(v for v, w in auto.vertex_map.items() if v == w)
        if fixed:
            raise NotFree("action has fixed vertices", {"vertices": fixed})
        flipped = sorted(
            eid for eid, img in auto.edge_map.items() if img == reverse_id(eid)
        )
        if flipped:
            raise NotCompatible(
                "action sends an edge to its reverse", {"edges": flipped}
            )

    vertex_projection: Dict[str, str] = {}
    for v in g.vertices:
        orbit = {auto.vertex_map[v] for auto in group}
        vertex_projection[v] = min(orbit)

    # Directed orbits carry an orientation; the quotient edge is named by
    # the smallest undirected member, oriented so that the directed edge
    # with that very id projects to itself.
    edge_projection: Dict[str, str] = {}
    for uid in g.undirected_ids():
        if uid in edge_projection:
            continue
        orbit_fwd = {auto.edge_map[uid] for auto in group}
        qid = min(undirected_id(e) for e in orbit_fwd)
        label = qid if qid in orbit_fwd else qid + "~"
        for member in orbit_fwd:
            edge_projection[member] = label
            edge_projection[reverse_id(member)] = reverse_id(label)

    qspecs = []
    for qid in sorted({undirected_id(q) for q in edge_projection.values()}):
        e = g.edges[qid]
        qspecs.append(
            (
                qid,
                vertex_projection[e.source],
                vertex_projection[e.target],
                g.weight(qid),
            )
        )

    qconnection: Dict[str, Dict[str, str]] = {}
    if g.has_connection():
        for eid in g.directed_ids():
            src = g.edges[eid].source
            if vertex_projection[src] != src:
                continue
            q = edge_projection[eid]
            qconnection[q] = {
                edge_projection[f]: edge_projection[g.nabla(eid)[f]]
                for f in g.star(src)
            }

    graph = GkmGraph.build(
        g.torus_rank, qspecs, qconnection if g.has_connection() else None
    )
    return QuotientResult(graph, vertex_projection, edge_projection, group)


@dataclass
class GraphIsomorphism:
    vertex_map: Dict[str, str]
    edge_map: Dict[str, str]


def find_label_isomorphism(g1: GkmGraph, g2: GkmGraph) -> Optional[GraphIsomorphism]:
    """A weight- and connection-preserving isomorphism, or None.

    Seeds every weight-compatible star bijection at a fixed vertex of g1
    against every vertex of g2 and keeps the first seed whose propagation
    closes up with matching weights everywhere.
    """
    from itertools import permutations

    if (
        len(g1.vertices) != len(g2.vertices)
        or g1.valence != g2.valence
        or g1.torus_rank != g2.torus_rank
    ):
        return None
    if not (g1.has_connection() and g2.has_connection()):
        raise ValueError("isomorphism search needs connections on both graphs")
    v1 = g1.vertices[0]
    star1 = g1.star(v1)
    for v2 in g2.vertices:
        for perm in permutations(g2.star(v2)):
            if any(g1.weight(a) != g2.weight(b) for a, b in zip(star1, perm)):
                continue
            seed = dict(zip(star1, perm))
            try:
                vmap, smaps = _propagate(_View(g1), _View(g2), v1, v2, seed)
            except WellDefinednessFailure:
                continue
            emap = {e: smaps[v][e] for v in g1.vertices for e in g1.star(v)}
            if all(g1.weight(e) == g2.weight(emap[e]) for e in emap):
                return GraphIsomorphism(vmap, emap)
    return None


def simplex_product_vertex_counts(n: int) -> Dict[Tuple[Tuple[str, int], ...], int]:
    """Vertex counts of all n-valent products of simplices.

    Keys are sorted factor multisets ((kind, size), ...); delta factors of
    size m contribute m + 1 vertices, sigma factors 2.
    """
    results: Dict[Tuple[Tuple[str, int], ...], int] = {}

    def rec(remaining, max_part, chosen):
        if remaining == 0:
            key = tuple(sorted(chosen))
            count = 1
            for kind, size in key:
                count *= (size + 1) if kind == "delta" else 2
            results[key] = count
            return
        for size in range(min(remaining, max_part), 0, -1):
            rec(remaining - size, size, chosen + [("delta", size)])
            if size >= 2:
                rec(remaining - size, size, chosen + [("sigma", size)])

    rec(n, n, [])
    return results


@dataclass(frozen=True)
class GapReport:
    valence: int
    hypercube_count: int
    best_other: int
    best_other_factors: Tuple[Tuple[str, int], ...]


def vertex_count_gap(n: int) -> GapReport:
    """Largest vertex count among n-valent simplex products besides the
    hypercube; exhibits the gap 3 * 2^(n-2) versus 2^n."""
    if n < 2:
        raise ValueError("gap needs valence at least 2")
    counts = simplex_product_vertex_counts(n)
    hypercube = tuple(("delta", 1) for _ in range(n))
    best, best_key = 0, None
    for key, count in counts.items():
        if key == hypercube:
            continue
        if count > best or (count == best and (best_key is None or key < best_key)):
            best, best_key = count, key
    return GapReport(n, counts[hypercube], best, best_key)
