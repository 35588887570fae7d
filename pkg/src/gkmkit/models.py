"""Standard GKM graphs from characteristic pairs, and Bott tower rings.

A characteristic pair assigns a label vector to every facet of a product
of simplices.  Edge weights are the dual basis vectors of the incident
labels at each endpoint; when the two endpoints produce different scales
on the same line (possible for orbifold pairs) the primitive integer
vector on that line is used instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .covering import Factor, ProductGraph, QuotientResult, quotient_graph
from .errors import DependentLabels
from .graph import GkmGraph, GraphAutomorphism, Weight
from .linalg import Q


def _unit(n: int, i: int, sign: int = 1) -> Tuple[Fraction, ...]:
    return tuple(Q(sign) if j == i else Q(0) for j in range(n))


def _facet_keys(factors: Sequence[Factor]) -> List[Tuple[int, int]]:
    keys = []
    for i, f in enumerate(factors):
        if f.kind == "delta":
            keys.extend((i, j) for j in range(f.size + 1))
        else:
            keys.extend((i, p) for p in range(1, f.size + 1))
    return keys


@dataclass
class CharacteristicPair:
    """Facet labels on a product of simplices.

    Delta factors of size m have facets 0..m, where facet j is opposite
    polytope vertex j; sigma factors have facets 1..m, facet p transverse
    to parallel class p.  Every label has length equal to the valence.
    """

    factors: Tuple[Factor, ...]
    labels: Dict[Tuple[int, int], Tuple[Fraction, ...]]

    @classmethod
    def make(cls, factors, labels) -> "CharacteristicPair":
        factors = tuple(factors)
        keys = _facet_keys(factors)
        if set(labels) != set(keys):
            raise ValueError("labels must cover exactly the facets")
        n = sum(f.size for f in factors)
        clean = {}
        for k in keys:
            vec = tuple(Q(x) for x in labels[k])
            if len(vec) != n:
                raise ValueError("label length must equal the valence")
            clean[k] = vec
        return cls(factors, clean)


def _incident_facets(factors, v) -> List[Tuple[int, int]]:
    out = []
    for i, f in enumerate(factors):
        if f.kind == "delta":
            out.extend((i, j) for j in range(f.size + 1) if j != v[i])
        else:
            out.extend((i, p) for p in range(1, f.size + 1))
    return out


def product_model(
    pair: CharacteristicPair,
    vertex_namer: Optional[Callable[[tuple], str]] = None,
) -> GkmGraph:
    """The GKM graph of a characteristic pair, with the translation
    connection of the underlying product.

    The weight of an edge is dual to the incident labels at its endpoints:
    it pairs to 1 with the transverse facet and to 0 with the facets
    containing the edge.  Raises DependentLabels when the labels at some
    vertex do not form a basis.
    """
    factors = tuple(pair.factors)
    p = ProductGraph(factors)
    n = p.valence

    nm = vertex_namer or (lambda v: ".".join(str(c) for c in v))
    names = {v: nm(v) for v in p.vertices}
    if len(set(names.values())) != len(names):
        raise ValueError("vertex namer is not injective")

    duals: Dict[tuple, Dict[Tuple[int, int], tuple]] = {}
    for v in p.vertices:
        inc = _incident_facets(factors, v)
        try:
            inv = linalg.invert([pair.labels[F] for F in inc])
        except ValueError:
            raise DependentLabels(
                "facet labels at a vertex are dependent",
                {"vertex": names[v], "facets": [list(F) for F in inc]},
            )
        duals[v] = dict(zip(inc, linalg.transpose(inv)))

    def uid_of(e0: tuple) -> str:
        v, i, m = e0
        base = "%s-%s" % (names[v], names[p.target(e0)])
        if factors[i].kind == "sigma":
            base += ":%d" % m
        return base

    specs = []
    for e0 in p.undirected_edges():
        v, i, m = e0
        w = p.target(e0)
        wu = duals[v][(i, m)]
        ww = duals[w][(i, p.reverse(e0)[2])]
        if Weight(wu) == Weight(ww):
            wt = Weight(wu)
        else:
            assert linalg.solve_in_span(ww, (wu,)) is not None
            wt = Weight(linalg.primitive_integer_vector(wu))
        specs.append((uid_of(e0), names[v], names[w], wt))

    def dtok(e: tuple) -> str:
        e0 = p.undirected(e)
        t = uid_of(e0)
        return t if e == e0 else t + "~"

    connection = {}
    for e in p.directed_edges():
        connection[dtok(e)] = {
            dtok(f): dtok(p.nabla_edge(e, f)) for f in p.star(e[0])
        }
    return GkmGraph.build(n, specs, connection)


def standard_product_pair(factors: Sequence[Factor]) -> CharacteristicPair:
    """Unit-vector labels; delta facet 0 gets the all-ones vector of its
    block."""
    factors = tuple(factors)
    n = sum(f.size for f in factors)
    labels = {}
    off = 0
    for i, f in enumerate(factors):
        if f.kind == "delta":
            labels[(i, 0)] = tuple(
                Q(1) if off <= j < off + f.size else Q(0) for j in range(n)
            )
            for j in range(1, f.size + 1):
                labels[(i, j)] = _unit(n, off + j - 1)
        else:
            for q in range(1, f.size + 1):
                labels[(i, q)] = _unit(n, off + q - 1)
        off += f.size
    return CharacteristicPair.make(factors, labels)


def standard_product_model(factors: Sequence[Factor]) -> GkmGraph:
    return product_model(standard_product_pair(factors))


def simplex_model(n: int) -> GkmGraph:
    """The complete graph on n + 1 vertices with projective-space weights."""
    if n < 1:
        raise ValueError("simplex dimension must be positive")
    return standard_product_model([Factor("delta", n)])


def sigma_model(m: int) -> GkmGraph:
    """Two vertices joined by m parallel edges with independent weights."""
    if m < 2:
        raise ValueError("sigma graphs need at least two parallel edges")
    return standard_product_model([Factor("sigma", m)])


def hirzebruch_model(a: int) -> GkmGraph:
    """The square with one opposite edge pair twisted by a."""
    pair = CharacteristicPair.make(
        (Factor("delta", 1), Factor("delta", 1)),
        {
            (0, 0): (1, 0),
            (0, 1): (1, 0),
            (1, 0): (a, 1),
            (1, 1): (0, 1),
        },
    )
    return product_model(pair)


def weighted_projective_model(a, b) -> GkmGraph:
    """Triangle with labels (a, b), e1, e2; orbifold weights in general."""
    pair = CharacteristicPair.make(
        (Factor("delta", 2),),
        {(0, 0): (a, b), (0, 1): (1, 0), (0, 2): (0, 1)},
    )
    return product_model(pair)


@dataclass
class HypercubeModel:
    """Hypercube with twisted labels, its rank-reduced form, the antipodal
    involution, and the quotient."""

    total: GkmGraph
    reduced: GkmGraph
    involution: GraphAutomorphism
    quotient: QuotientResult


def hypercube_involution_model(n: int) -> HypercubeModel:
    """Twisted hypercube whose antipodal map preserves the reduced labels.

    Labels pair coordinate directions with the last one; the full-rank
    weights are not antipode-invariant, but dropping the last coordinate
    leaves a free label-preserving involution, and the quotient is a
    GKM graph of rank n - 1 on 2^(n-1) vertices.
    """
    if n < 3:
        raise ValueError("the involution model needs n >= 3")
    factors = tuple(Factor("delta", 1) for _ in range(n))
    labels = {}
    for i in range(n - 1):
        plus = list(_unit(n, i))
        plus[n - 1] = Q(1)
        minus = list(_unit(n, i))
        minus[n - 1] = Q(-1)
        labels[(i, 0)] = tuple(plus)
        labels[(i, 1)] = tuple(minus)
    labels[(n - 1, 0)] = _unit(n, n - 1)
    labels[(n - 1, 1)] = _unit(n, n - 1, -1)
    pair = CharacteristicPair.make(factors, labels)

    namer = lambda v: "".join("+" if c == 1 else "-" for c in v)
    total = product_model(pair, vertex_namer=namer)

    reduced_weights = {
        uid: Weight(total.weights[uid].vector[:-1]) for uid in total.undirected_ids()
    }
    reduced = total.with_weights(n - 1, reduced_weights)

    flip = {
        v: "".join("-" if c == "+" else "+" for c in v) for v in reduced.vertices
    }
    tau = GraphAutomorphism.from_vertex_map(reduced, flip)
    quotient = quotient_graph(reduced, [tau])
    return HypercubeModel(total, reduced, tau, quotient)


# -- Bott tower cohomology ---------------------------------------------------


@dataclass(frozen=True)
class BottStage:
    """One projectivization stage: fiber dimension and the twist vector of
    each nontrivial line summand over the earlier stages."""

    dim: int
    twists: Tuple[Tuple[int, ...], ...]


def _poly_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for exp, c in q.items():
        s = out.get(exp, Q(0)) + c
        if s == 0:
            out.pop(exp, None)
        else:
            out[exp] = s
    return out


def _poly_scale(p: dict, c) -> dict:
    c = Q(c)
    if c == 0:
        return {}
    return {exp: v * c for exp, v in p.items()}


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            exp = tuple(a + b for a, b in zip(e1, e2))
            s = out.get(exp, Q(0)) + c1 * c2
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
    return out


class BottTowerRing:
    """Cohomology of a generalized Bott tower as a quotient polynomial ring.

    Generators x_j, one per stage, with the relation
    x_j * prod_l (x_j + twist) = 0.  Elements are exponent dictionaries;
    reduce rewrites the highest violating stage first, which terminates
    because substitution only raises earlier exponents.
    """

    def __init__(self, stages: Sequence[BottStage]):
        self.stages = tuple(stages)
        r = len(self.stages)
        for j, st in enumerate(self.stages):
            if st.dim < 1:
                raise ValueError("stage dimension must be positive")
            if len(st.twists) != st.dim:
                raise ValueError("stage %d needs %d twist vectors" % (j, st.dim))
            if any(len(t) != j for t in st.twists):
                raise ValueError("stage %d twists must cover earlier stages" % j)
        self.rank = r
        self.relations: List[dict] = []
        for j, st in enumerate(self.stages):
            rel = self.variable(j)
            for t in st.twists:
                lin = self.variable(j)
                for l, c in enumerate(t):
                    if c:
                        lin = _poly_add(lin, _poly_scale(self.variable(l), c))
                rel = _poly_mul(rel, lin)
            self.relations.append(rel)

    def variable(self, j: int) -> dict:
        exp = tuple(1 if i == j else 0 for i in range(self.rank))
        return {exp: Q(1)}

    def constant(self, c) -> dict:
        c = Q(c)
        return {} if c == 0 else {(0,) * self.rank: c}

    def add(self, p: dict, q: dict) -> dict:
        return _poly_add(p, q)

    def multiply(self, p: dict, q: dict) -> dict:
        return self.reduce(_poly_mul(p, q))

    def reduce(self, p: dict) -> dict:
        p = dict(p)
        while True:
            hit = None
            for exp in p:
                for j in range(self.rank - 1, -1, -1):
                    if exp[j] > self.stages[j].dim:
                        if hit is None or j > hit[1]:
                            hit = (exp, j)
                        break
            if hit is None:
                return p
            exp, j = hit
            c = p.pop(exp)
            rest = list(exp)
            rest[j] -= self.stages[j].dim + 1
            monomial = {tuple(rest): c}
            tail = dict(self.relations[j])
            top = tuple(
                self.stages[j].dim + 1 if i == j else 0 for i in range(self.rank)
            )
            tail.pop(top)
            p = _poly_add(p, _poly_mul(monomial, _poly_scale(tail, -1)))

    def is_zero(self, p: dict) -> bool:
        return not self.reduce(p)

    def monomial_basis(self) -> Tuple[tuple, ...]:
        def rec(j):
            if j == self.rank:
                yield ()
                return
            for rest in rec(j + 1):
                for e in range(self.stages[j].dim + 1):
                    yield (e,) + rest

        return tuple(sorted(rec(0)))

    def betti(self) -> Tuple[int, ...]:
        total = [1]
        for st in self.stages:
            new = [0] * (len(total) + st.dim)
            for d, c in enumerate(total):
                for e in range(st.dim + 1):
                    new[d + e] += c
            total = new
        return tuple(total)

    @property
    def total_rank(self) -> int:
        out = 1
        for st in self.stages:
            out *= st.dim + 1
        return out


def bott_tower_cohomology(stages: Sequence[BottStage]) -> BottTowerRing:
    return BottTowerRing(stages)


def poly_string(p: dict, names: Optional[Sequence[str]] = None) -> str:
    """Deterministic text form of an exponent-dict polynomial."""
    if not p:
        return "0"
    parts = []
    for exp in sorted(p):
        c = p[exp]
        body = "*".join(
            ("x%d" % i if names is None else names[i]) + ("" if e == 1 else "^%d" % e)
            for i, e in enumerate(exp)
            if e
        )
        mag = abs(c)
        if not body:
            term = linalg.q_to_str(mag)
        elif mag == 1:
            term = body
        else:
            term = "%s*%s" % (linalg.q_to_str(mag), body)
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)
