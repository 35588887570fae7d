"""GKM graphs: weighted graphs with a connection, validation, interchange.

A graph is stored with explicit directed edges.  Each undirected edge with
id "e" contributes the directed edge "e" and its reverse "e~".  Weights are
attached to undirected edges and are canonicalized up to sign only; the
scale is preserved (orbifold weights may be non-integral).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    AmbiguousConnection,
    GraphFormatError,
    NoCandidate,
    Verdict,
)
from .linalg import Q


def reverse_id(edge_id: str) -> str:
    return edge_id[:-1] if edge_id.endswith("~") else edge_id + "~"


def undirected_id(edge_id: str) -> str:
    return edge_id[:-1] if edge_id.endswith("~") else edge_id


class Weight:
    """A nonzero rational vector up to sign.

    The stored representative has positive first nonzero entry; the scale is
    kept as given.
    """

    __slots__ = ("vector",)

    def __init__(self, vector):
        vec = tuple(Q(x) for x in vector)
        first = next((x for x in vec if x != 0), None)
        if first is None:
            raise ValueError("weight must be nonzero")
        if first < 0:
            vec = tuple(-x for x in vec)
        object.__setattr__(self, "vector", vec)

    def __setattr__(self, name, value):
        raise AttributeError("Weight is immutable")

    @property
    def rank(self) -> int:
        return len(self.vector)

    def __eq__(self, other):
        return isinstance(other, Weight) and self.vector == other.vector

    def __hash__(self):
        return hash(self.vector)

    def __repr__(self):
        return "Weight(%s)" % ", ".join(linalg.q_to_str(x) for x in self.vector)


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str

    @property
    def reverse(self) -> str:
        return reverse_id(self.id)

    @property
    def undirected(self) -> str:
        return undirected_id(self.id)


class GkmGraph:
    """A labelled graph with an optional connection.

    vertices: sorted vertex tokens.
    edges: directed edges, both directions present for every undirected edge.
    weights: one Weight per undirected edge id.
    connection: per directed edge id, a map star(source) -> star(target).
    """

    def __init__(
        self,
        torus_rank: int,
        vertices: Iterable[str],
        edges: Mapping[str, Edge],
        weights: Mapping[str, Weight],
        connection: Optional[Mapping[str, Mapping[str, str]]] = None,
    ):
        self.torus_rank = int(torus_rank)
        self.vertices: Tuple[str, ...] = tuple(sorted(vertices))
        self.edges: Dict[str, Edge] = dict(edges)
        self.weights: Dict[str, Weight] = dict(weights)
        self.connection = None
        if connection is not None:
            self.connection = {e: dict(m) for e, m in connection.items()}
        stars: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for eid in sorted(self.edges):
            e = self.edges[eid]
            if e.source in stars:
                stars[e.source].append(eid)
        self._stars = {v: tuple(es) for v, es in stars.items()}

    @classmethod
    def build(
        cls,
        torus_rank: int,
        edge_specs: Sequence[tuple],
        connection: Optional[Mapping[str, Mapping[str, str]]] = None,
        vertices: Optional[Iterable[str]] = None,
    ) -> "GkmGraph":
        """Build from (undirected id, source, target, weight vector) tuples."""
        edges: Dict[str, Edge] = {}
        weights: Dict[str, Weight] = {}
        verts = set(vertices) if vertices is not None else set()
        for uid, src, dst, wvec in edge_specs:
            if uid.endswith("~"):
                raise ValueError("undirected edge id may not end with '~': %r" % uid)
            if uid in edges:
                raise ValueError("duplicate edge id %r" % uid)
            edges[uid] = Edge(uid, src, dst)
            edges[uid + "~"] = Edge(uid + "~", dst, src)
            weights[uid] = wvec if isinstance(wvec, Weight) else Weight(wvec)
            verts.add(src)
            verts.add(dst)
        return cls(torus_rank, verts, edges, weights, connection)

    # -- basic accessors -------------------------------------------------

    def star(self, v: str) -> Tuple[str, ...]:
        return self._stars[v]

    @property
    def valence(self) -> int:
        if not self.vertices:
            return 0
        return len(self._stars[self.vertices[0]])

    def edge(self, eid: str) -> Edge:
        return self.edges[eid]

    def weight(self, eid: str) -> Weight:
        return self.weights[undirected_id(eid)]

    def weight_vector(self, eid: str):
        return self.weights[undirected_id(eid)].vector

    def undirected_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(self.weights))

    def directed_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(self.edges))

    def nabla(self, eid: str) -> Dict[str, str]:
        if self.connection is None:
            raise ValueError("graph has no connection")
        return self.connection[eid]

    def has_connection(self) -> bool:
        return self.connection is not None

    def with_connection(self, connection) -> "GkmGraph":
        return GkmGraph(self.torus_rank, self.vertices, self.edges, self.weights, connection)

    def with_weights(self, torus_rank: int, weights: Mapping[str, Weight]) -> "GkmGraph":
        return GkmGraph(torus_rank, self.vertices, self.edges, weights, self.connection)

    def neighbors(self, v: str) -> Tuple[str, ...]:
        return tuple(self.edges[e].target for e in self._stars[v])

    # -- interchange ------------------------------------------------------

    def to_json_dict(self) -> dict:
        edges = []
        for uid in sorted(self.weights):
            e = self.edges[uid]
            edges.append(
                {
                    "id": uid,
                    "source": e.source,
                    "target": e.target,
                    "weight": linalg.vec_to_strs(self.weights[uid].vector),
                }
            )
        doc = {
            "torus_rank": self.torus_rank,
            "vertices": list(self.vertices),
            "edges": edges,
        }
        if self.connection is not None:
            doc["connection"] = [
                {"along": eid, "map": dict(sorted(self.connection[eid].items()))}
                for eid in sorted(self.connection)
            ]
        return doc

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GkmGraph":
        if not isinstance(doc, dict):
            raise GraphFormatError("graph document must be an object")
        allowed = {"torus_rank", "vertices", "edges", "connection"}
        unknown = set(doc) - allowed
        if unknown:
            raise GraphFormatError("unknown fields: %s" % sorted(unknown))
        for field in ("torus_rank", "vertices", "edges"):
            if field not in doc:
                raise GraphFormatError("missing field %r" % field)
        if not isinstance(doc["torus_rank"], int) or doc["torus_rank"] < 1:
            raise GraphFormatError("torus_rank must be a positive integer")
        if not isinstance(doc["vertices"], list) or not all(isinstance(v, str) for v in doc["vertices"]):
            raise GraphFormatError("vertices must be a list of strings")
        if len(set(doc["vertices"])) != len(doc["vertices"]):
            raise GraphFormatError("duplicate vertices")
        edges: Dict[str, Edge] = {}
        weights: Dict[str, Weight] = {}
        if not isinstance(doc["edges"], list):
            raise GraphFormatError("edges must be a list")
        for rec in doc["edges"]:
            if not isinstance(rec, dict):
                raise GraphFormatError("edge record must be an object")
            unknown = set(rec) - {"id", "source", "target", "weight"}
            if unknown:
                raise GraphFormatError("unknown edge fields: %s" % sorted(unknown))
            try:
                uid, src, dst, wt = rec["id"], rec["source"], rec["target"], rec["weight"]
            except KeyError as exc:
                raise GraphFormatError("edge record missing %s" % exc)
            if not all(isinstance(x, str) for x in (uid, src, dst)):
                raise GraphFormatError("edge id/source/target must be strings")
            if uid.endswith("~"):
                raise GraphFormatError("edge id may not end with '~': %r" % uid)
            if uid in edges:
                raise GraphFormatError("duplicate edge id %r" % uid)
            if not isinstance(wt, list) or not all(isinstance(x, str) for x in wt):
                raise GraphFormatError("weight must be a list of rational strings")
            try:
                wvec = linalg.vec_from_strs(wt)
            except (ValueError, ZeroDivisionError) as exc:
                raise GraphFormatError("bad rational in weight of %r: %s" % (uid, exc))
            if len(wvec) != doc["torus_rank"]:
                raise GraphFormatError("weight of %r has wrong length" % uid)
            if all(x == 0 for x in wvec):
                raise GraphFormatError("weight of %r is zero" % uid)
            edges[uid] = Edge(uid, src, dst)
            edges[uid + "~"] = Edge(uid + "~", dst, src)
            weights[uid] = Weight(wvec)
        connection = None
        if "connection" in doc:
            if not isinstance(doc["connection"], list):
                raise GraphFormatError("connection must be a list")
            given: Dict[str, Dict[str, str]] = {}
            for rec in doc["connection"]:
                if not isinstance(rec, dict):
                    raise GraphFormatError("connection record must be an object")
                unknown = set(rec) - {"along", "map"}
                if unknown:
                    raise GraphFormatError("unknown connection fields: %s" % sorted(unknown))
                if "along" not in rec or "map" not in rec:
                    raise GraphFormatError("connection record needs 'along' and 'map'")
                along, mapping = rec["along"], rec["map"]
                if not isinstance(along, str) or not isinstance(mapping, dict):
                    raise GraphFormatError("bad connection record types")
                if not all(isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()):
                    raise GraphFormatError("connection map must be string to string")
                if along in given:
                    raise GraphFormatError("duplicate connection entry for %r" % along)
                if along not in mapping or mapping[along] != reverse_id(along):
                    raise GraphFormatError(
                        "connection along %r must map it to its reverse" % along
                    )
                given[along] = dict(mapping)
            connection = {}
            for along, mapping in given.items():
                connection[along] = mapping
            for along, mapping in given.items():
                rev = reverse_id(along)
                if rev not in connection:
                    connection[rev] = {v: k for k, v in mapping.items()}
                elif any(connection[rev].get(v) != k for k, v in mapping.items()):
                    raise GraphFormatError(
                        "connection along %r is not inverse to %r" % (rev, along)
                    )
        return cls(doc["torus_rank"], doc["vertices"], edges, weights, connection)

    @classmethod
    def from_json(cls, text: str) -> "GkmGraph":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError("invalid JSON: %s" % exc)
        return cls.from_json_dict(doc)


# -- validation -----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: Optional[object] = None


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[CheckResult, ...]
    gkm_order: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> Tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)


def _connected(g: GkmGraph) -> bool:
    if not g.vertices:
        return True
    seen = {g.vertices[0]}
    stack = [g.vertices[0]]
    while stack:
        v = stack.pop()
        for eid in g.star(v):
            w = g.edges[eid].target
            # an edge may point at an undeclared vertex; that is the
            # vertex_references check's problem, not a reason to crash here
            if w not in seen and w in g._stars:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


def validate_structure(g: GkmGraph) -> ValidationReport:
    """Structural checks: pairing, valence, weights, connection axioms.

    Dangling references and axiom violations become failed checks with
    witnesses rather than exceptions.
    """
    checks: List[CheckResult] = []

    dangling = sorted(
        eid
        for eid, e in g.edges.items()
        if e.source not in g._stars or e.target not in g._stars
    )
    checks.append(CheckResult("vertex_references", not dangling, dangling or None))

    loops = sorted(eid for eid, e in g.edges.items() if e.source == e.target)
    checks.append(CheckResult("no_loops", not loops, loops or None))

    bad_pairing = sorted(
        eid
        for eid, e in g.edges.items()
        if e.reverse not in g.edges
        or g.edges[e.reverse].source != e.target
        or g.edges[e.reverse].target != e.source
    )
    checks.append(CheckResult("reverse_pairing", not bad_pairing, bad_pairing or None))

    missing_weight = sorted(
        {undirected_id(eid) for eid in g.edges} - set(g.weights)
    )
    extra_weight = sorted(set(g.weights) - {undirected_id(eid) for eid in g.edges})
    bad_rank = sorted(u for u, w in g.weights.items() if w.rank != g.torus_rank)
    weight_witness = {
        k: v
        for k, v in (
            ("missing", missing_weight),
            ("orphaned", extra_weight),
            ("wrong_rank", bad_rank),
        )
        if v
    }
    checks.append(CheckResult("edge_weights", not weight_witness, weight_witness or None))

    valences = {v: len(g.star(v)) for v in g.vertices}
    uniform = len(set(valences.values())) <= 1
    checks.append(
        CheckResult("uniform_valence", uniform, None if uniform else valences)
    )

    connected = _connected(g)
    checks.append(CheckResult("connected", connected))

    structural_ok = not (dangling or loops or bad_pairing or weight_witness)

    if g.connection is not None:
        witness = _connection_structure_witness(g) if not dangling else {"skipped": "dangling references"}
        checks.append(CheckResult("connection_axioms", witness is None, witness))

    return ValidationReport(tuple(checks), gkm_order=gkm_order(g) if structural_ok else None)


def _connection_structure_witness(g: GkmGraph):
    conn = g.connection
    missing = sorted(set(g.edges) - set(conn))
    if missing:
        return {"missing_edges": missing}
    extra = sorted(set(conn) - set(g.edges))
    if extra:
        return {"unknown_edges": extra}
    for eid in sorted(conn):
        e = g.edges[eid]
        mapping = conn[eid]
        src_star, dst_star = set(g.star(e.source)), set(g.star(e.target))
        if set(mapping) != src_star or set(mapping.values()) != dst_star:
            return {"not_bijection_along": eid}
        if mapping[eid] != e.reverse:
            return {"edge_not_sent_to_reverse": eid}
        inv = conn[e.reverse]
        if any(inv[v] != k for k, v in mapping.items()):
            return {"not_inverse_along": eid}
    return None


def check_gkm_k(g: GkmGraph, k: int) -> Verdict:
    """Every k-subset of lifted weights at every vertex is linearly independent."""
    from itertools import combinations

    if k < 1:
        raise ValueError("k must be positive")
    for v in g.vertices:
        star = g.star(v)
        if k > len(star):
            return Verdict(False, {"vertex": v, "reason": "valence below k"})
        for combo in combinations(star, k):
            vectors = [g.weight_vector(e) for e in combo]
            if linalg.rank(vectors) < k:
                return Verdict(False, {"vertex": v, "edges": list(combo)})
    return Verdict(True)


def gkm_order(g: GkmGraph) -> int:
    """The largest k with every k-subset of incident weights independent."""
    order = 0
    for k in range(1, g.valence + 1):
        if check_gkm_k(g, k):
            order = k
        else:
            break
    return order


def check_effective(g: GkmGraph) -> bool:
    """Do the weights at each vertex span the full rank-k space?"""
    for v in g.vertices:
        vectors = [g.weight_vector(e) for e in g.star(v)]
        if linalg.rank(vectors) < g.torus_rank:
            return False
    return True


def connection_pq(g: GkmGraph, base: str, other: str):
    """The (p, q) with w(nabla_base(other)) = p*w(other) + q*w(base).

    Canonical-sign representatives are used throughout, so (p, q) is the
    canonical member of its sign class.  Returns None if the image weight
    is outside the span.
    """
    image = g.nabla(base)[other]
    coeffs = linalg.solve_in_span(
        g.weight_vector(image), (g.weight_vector(other), g.weight_vector(base))
    )
    if coeffs is None:
        return None
    return coeffs


def check_connection_compat(g: GkmGraph):
    """Eq-compatibility of the connection with the weights.

    Returns (Verdict, table) where table maps (vertex, base edge, other
    edge) to the canonical (p, q) pair.
    """
    table = {}
    for v in g.vertices:
        for base in g.star(v):
            for other in g.star(v):
                if other == base:
                    continue
                pq = connection_pq(g, base, other)
                if pq is None:
                    return (
                        Verdict(False, {"vertex": v, "along": base, "edge": other}),
                        table,
                    )
                table[(v, base, other)] = pq
    return Verdict(True), table


def check_manifold_integrality(g: GkmGraph) -> Verdict:
    """p = +-1 and q integral for every connection relation.

    Sign flips of the three lifts only negate p or q, so this is the
    four-combination check collapsed to the canonical representative.
    """
    verdict, table = check_connection_compat(g)
    if not verdict:
        return verdict
    for (v, base, other), (p, q) in sorted(table.items()):
        if abs(p) != 1 or q.denominator != 1:
            return Verdict(
                False,
                {
                    "vertex": v,
                    "along": base,
                    "edge": other,
                    "p": linalg.q_to_str(p),
                    "q": linalg.q_to_str(q),
                },
            )
    return Verdict(True)


class GraphAutomorphism:
    """An automorphism of a graph, given by its action on directed edges.

    The vertex action is derived; equality and hashing use the edge map.
    Whether weights and the connection are preserved is a separate check
    (check_automorphism), since callers sometimes build candidates first.
    """

    __slots__ = ("edge_map", "vertex_map")

    def __init__(self, g: GkmGraph, edge_map: Mapping[str, str]):
        em = dict(edge_map)
        if set(em) != set(g.edges):
            raise ValueError("edge map must cover all directed edges")
        vm: Dict[str, str] = {}
        for eid, img in em.items():
            if img not in g.edges:
                raise ValueError("unknown image edge %r" % img)
            src = g.edges[eid].source
            want = g.edges[img].source
            if vm.setdefault(src, want) != want:
                raise ValueError("edge map induces no vertex map at %r" % src)
        self.edge_map = em
        self.vertex_map = vm

    @classmethod
    def identity(cls, g: GkmGraph) -> "GraphAutomorphism":
        return cls(g, {eid: eid for eid in g.edges})

    @classmethod
    def from_vertex_map(cls, g: GkmGraph, vertex_map: Mapping[str, str]) -> "GraphAutomorphism":
        """Lift a vertex bijection to edges; fails on parallel edges."""
        em = {}
        for eid, e in g.edges.items():
            src, dst = vertex_map[e.source], vertex_map[e.target]
            images = [
                f
                for f in g.star(src)
                if g.edges[f].target == dst
            ]
            if len(images) != 1:
                raise ValueError(
                    "vertex map does not determine the image of %r" % eid
                )
            em[eid] = images[0]
        return cls(g, em)

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self.edge_map.items())

    def apply_vertex(self, v: str) -> str:
        return self.vertex_map[v]

    def apply_edge(self, eid: str) -> str:
        return self.edge_map[eid]

    def compose(self, other: "GraphAutomorphism", g: GkmGraph) -> "GraphAutomorphism":
        """self after other."""
        return GraphAutomorphism(
            g, {eid: self.edge_map[other.edge_map[eid]] for eid in self.edge_map}
        )

    def _key(self):
        return tuple(sorted(self.edge_map.items()))

    def __eq__(self, other):
        return isinstance(other, GraphAutomorphism) and self.edge_map == other.edge_map

    def __hash__(self):
        return hash(self._key())


def check_automorphism(g: GkmGraph, auto: GraphAutomorphism) -> Verdict:
    """Bijectivity, incidence, weight equality, connection equivariance."""
    if sorted(auto.edge_map.values()) != sorted(g.edges):
        return Verdict(False, {"reason": "edge map is not a bijection"})
    if sorted(auto.vertex_map.values()) != sorted(g.vertices):
        return Verdict(False, {"reason": "vertex map is not a bijection"})
    for eid, img in sorted(auto.edge_map.items()):
        e, f = g.edges[eid], g.edges[img]
        if f.source != auto.vertex_map[e.source] or f.target != auto.vertex_map[e.target]:
            return Verdict(False, {"reason": "incidence broken", "edge": eid})
        if auto.edge_map[e.reverse] != f.reverse:
            return Verdict(False, {"reason": "reverse broken", "edge": eid})
        if g.weight(eid) != g.weight(img):
            return Verdict(False, {"reason": "weight changed", "edge": eid})
    if g.connection is not None:
        for eid in sorted(g.edges):
            img = auto.edge_map[eid]
            for f in g.star(g.edges[eid].source):
                if auto.edge_map[g.nabla(eid)[f]] != g.nabla(img)[auto.edge_map[f]]:
                    return Verdict(
                        False,
                        {"reason": "connection broken", "along": eid, "edge": f},
                    )
    return Verdict(True)


def generate_group(g: GkmGraph, generators: Sequence[GraphAutomorphism]):
    """Closure of the generators under composition, identity first.

    Deterministic order: identity, then by sorted edge-map key.
    """
    elements = {GraphAutomorphism.identity(g)}
    frontier = list(generators)
    while frontier:
        a = frontier.pop()
        if a in elements:
            continue
        elements.add(a)
        for b in list(elements):
            for c in (a.compose(b, g), b.compose(a, g)):
                if c not in elements:
                    frontier.append(c)
        if len(elements) > 4096:
            raise ValueError("automorphism group too large")
    ordered = sorted(elements, key=lambda a: (not a.is_identity, a._key()))
    return tuple(ordered)


def infer_connection(g: GkmGraph) -> GkmGraph:
    """Reconstruct the unique admissible connection from the weights.

    For each directed edge e and each e' at its source, the image is the
    unique edge at the target (other than the reverse of e) whose weight
    lies in span(w(e), w(e')).  Uniqueness needs 3-independence where the
    valence admits it; raises AmbiguousConnection or NoCandidate otherwise.
    """
    connection: Dict[str, Dict[str, str]] = {}
    for eid in g.directed_ids():
        e = g.edges[eid]
        span = (g.weight_vector(eid),)
        mapping = {eid: e.reverse}
        for other in g.star(e.source):
            if other == eid:
                continue
            gens = (g.weight_vector(other), g.weight_vector(eid))
            candidates = [
                f
                for f in g.star(e.target)
                if f != e.reverse
                and linalg.solve_in_span(g.weight_vector(f), gens) is not None
            ]
            if not candidates:
                raise NoCandidate(
                    "no image for %r along %r" % (other, eid),
                    {"along": eid, "edge": other},
                )
            if len(candidates) > 1:
                raise AmbiguousConnection(
                    "multiple images for %r along %r" % (other, eid),
                    {"along": eid, "edge": other, "candidates": candidates},
                )
            mapping[other] = candidates[0]
        if len(set(mapping.values())) != len(mapping):
            raise AmbiguousConnection(
                "images along %r collide" % eid, {"along": eid}
            )
        connection[eid] = mapping
    return g.with_connection(connection)
