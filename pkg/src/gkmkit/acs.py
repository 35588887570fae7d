"""Sign lifts of the edge labels and quasitoric sign tests.

A graph's labels are stored modulo sign.  Some graphs admit a consistent
choice of signs, one bit per undirected edge, under which every
connection relation reads value(image) = value(edge) - c * value(base)
with an integer c.  Existence of such a lift is the combinatorial
counterpart of an invariant almost complex structure; biangles always
obstruct it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .covering import CoveringMap, build_covering, deck_group
from .errors import NotProductOfSimplices, Verdict
from .extension import extend_to_gkm_n
from .faces import check_small_three_faces
from .graph import GkmGraph, connection_pq, undirected_id


@dataclass(frozen=True)
class AcsLift:
    """Signed edge values; values[reverse] = -values[e]."""

    values: Dict[str, tuple]
    orientation: Dict[str, int]

    def value(self, edge_id: str) -> tuple:
        return self.values[edge_id]


@dataclass(frozen=True)
class AcsSearch:
    ok: bool
    lift: Optional[AcsLift]
    witness: Optional[dict]


def _direction(edge_id: str) -> int:
    return -1 if edge_id.endswith("~") else 1


def _signed_values(g: GkmGraph, orientation: Dict[str, int]) -> Dict[str, tuple]:
    values = {}
    for uid in g.undirected_ids():
        vec = g.weight_vector(uid)
        fwd = linalg.vec_scale(orientation[uid], vec)
        values[uid] = fwd
        values[uid + "~"] = linalg.vec_neg(fwd)
    return values


def verify_acs_lift(g: GkmGraph, lift: AcsLift) -> Verdict:
    """Exhaustive re-check: every relation holds with p = 1, q integral."""
    for eid in g.directed_ids():
        rid = eid[:-1] if eid.endswith("~") else eid + "~"
        if lift.values[rid] != linalg.vec_neg(lift.values[eid]):
            return Verdict(False, {"edge": eid, "reason": "reverse is not negated"})
    for v in g.vertices:
        for base in g.star(v):
            nabla = g.nabla(base)
            sb = lift.values[base]
            for other in g.star(v):
                image = nabla[other]
                so, si = lift.values[other], lift.values[image]
                diff = linalg.vec_sub(so, si)
                coeff = None
                for a, b in zip(diff, sb):
                    if b != 0:
                        coeff = Fraction(a) / b
                        break
                if coeff is None:
                    coeff = Fraction(0)
                if linalg.vec_sub(diff, linalg.vec_scale(coeff, sb)) != tuple(
                    Fraction(0) for _ in sb
                ):
                    return Verdict(
                        False,
                        {"vertex": v, "base": base, "edge": other, "reason": "p != 1"},
                    )
                if coeff.denominator != 1:
                    return Verdict(
                        False,
                        {
                            "vertex": v,
                            "base": base,
                            "edge": other,
                            "reason": "q not integral",
                            "q": linalg.q_to_str(coeff),
                        },
                    )
    return Verdict(True)


class _ParityForest:
    """Union-find over undirected edges with a sign relation per union.

    The constraint forest is kept explicit (no path compression) so a
    contradiction can report the chain of relations that closes an
    inconsistent cycle.
    """

    def __init__(self, nodes):
        self.parent = {x: x for x in nodes}
        self.rel = {x: 0 for x in nodes}
        self.reason = {x: None for x in nodes}

    def find(self, x) -> Tuple[str, int]:
        parity = 0
        while self.parent[x] != x:
            parity ^= self.rel[x]
            x = self.parent[x]
        return x, parity

    def chain(self, x) -> List[dict]:
        out = []
        while self.parent[x] != x:
            out.append(self.reason[x])
            x = self.parent[x]
        return out

    def union(self, a, b, rel: int, why: dict) -> Optional[List[dict]]:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            if pa ^ pb != rel:
                return self.chain(a) + self.chain(b) + [why]
            return None
        self.parent[ra] = rb
        self.rel[ra] = pa ^ pb ^ rel
        self.reason[ra] = why
        return None


def find_acs_lift(g: GkmGraph) -> AcsSearch:
    """Search for a consistent sign assignment by constraint propagation.

    Every connection relation ties the signs of two undirected edges
    through the canonical coefficient p; propagation over all relations
    either fixes the signs up to harmless global flips or closes an
    inconsistent cycle, which is returned as the witness.
    """
    forest = _ParityForest(list(g.undirected_ids()))
    for v in g.vertices:
        for base in g.star(v):
            nabla = g.nabla(base)
            for other in g.star(v):
                if other == base:
                    continue
                image = nabla[other]
                pq = connection_pq(g, base, other)
                if pq is None:
                    return AcsSearch(
                        False,
                        None,
                        {
                            "reason": "image weight outside the span",
                            "vertex": v,
                            "base": base,
                            "edge": other,
                        },
                    )
                p, q = pq
                if abs(p) != 1:
                    return AcsSearch(
                        False,
                        None,
                        {
                            "reason": "coefficient p is not a unit",
                            "vertex": v,
                            "base": base,
                            "edge": other,
                            "p": linalg.q_to_str(p),
                        },
                    )
                if q.denominator != 1:
                    return AcsSearch(
                        False,
                        None,
                        {
                            "reason": "coefficient q is not integral",
                            "vertex": v,
                            "base": base,
                            "edge": other,
                            "q": linalg.q_to_str(q),
                        },
                    )
                uo, ui = undirected_id(other), undirected_id(image)
                required = int(p) * _direction(other) * _direction(image)
                why = {
                    "vertex": v,
                    "base": base,
                    "edge": other,
                    "image": image,
                    "p": int(p),
                }
                if uo == ui:
                    if required == -1:
                        return AcsSearch(
                            False,
                            None,
                            {"reason": "sign contradiction", "cycle": [why]},
                        )
                    continue
                core = forest.union(uo, ui, 0 if required == 1 else 1, why)
                if core is not None:
                    return AcsSearch(
                        False, None, {"reason": "sign contradiction", "cycle": core}
                    )
    orientation = {}
    for uid in g.undirected_ids():
        _, parity = forest.find(uid)
        orientation[uid] = 1 if parity == 0 else -1
    lift = AcsLift(_signed_values(g, orientation), orientation)
    verdict = verify_acs_lift(g, lift)
    if not verdict:
        raise AssertionError(
            "propagation produced an invalid lift: %s" % (verdict.witness,)
        )
    return AcsSearch(True, lift, None)


# -- quasitoric sign test ----------------------------------------------------


def _simplex_point(size: int, coord: int) -> tuple:
    point = [Fraction(0)] * size
    if coord > 0:
        point[coord - 1] = Fraction(1)
    return tuple(point)


def quasitoric_sign_check(g: GkmGraph, lift: Optional[AcsLift] = None) -> bool:
    """Whether det(edge directions) * det(signed weights) has constant sign.

    The graph must cover itself trivially as a product of simplices; each
    simplex factor is embedded with vertices at the origin and the unit
    points, and the weights are taken from the lift (searched for when not
    supplied).
    """
    cov = build_covering(g)
    if cov.degree != 1:
        raise NotProductOfSimplices(
            "the covering is nontrivial", {"degree": cov.degree}
        )
    if any(f.kind != "delta" for f in cov.factors):
        raise NotProductOfSimplices(
            "biangle factors present",
            {"factors": [(f.kind, f.size) for f in cov.factors]},
        )
    if g.torus_rank != g.valence:
        raise ValueError("full-rank labels required (torus rank = valence)")
    if lift is None:
        found = find_acs_lift(g)
        if not found.ok:
            return False
        lift = found.lift
    offsets = []
    total = 0
    for f in cov.factors:
        offsets.append(total)
        total += f.size
    product = cov.product
    signs = set()
    for pv in product.vertices:
        directions = []
        weights = []
        for pe in product.star(pv):
            _, i, move = pe
            here = _simplex_point(cov.factors[i].size, pv[i])
            there = _simplex_point(cov.factors[i].size, move)
            column = [Fraction(0)] * total
            for j, (a, b) in enumerate(zip(there, here)):
                column[offsets[i] + j] = a - b
            directions.append(column)
            weights.append(list(lift.values[cov.star_maps[pv][pe]]))
        d1 = linalg.det(list(zip(*directions)))
        d2 = linalg.det(list(zip(*weights)))
        if d1 == 0 or d2 == 0:
            raise ValueError("degenerate vertex data")
        signs.add((d1 > 0) == (d2 > 0))
        if len(signs) > 1:
            return False
    return True


# -- recognition chain -------------------------------------------------------


@dataclass(frozen=True)
class BottReport:
    recognized: bool
    stage: Optional[str]
    witness: Optional[dict]
    factors: Optional[Tuple[int, ...]]
    lift: Optional[AcsLift]


def recognize_bott(g: GkmGraph) -> BottReport:
    """Decide whether the graph passes the generalized Bott tower chain.

    Stages: small three-face types, sign lift, covering construction,
    simplex factors only, trivial deck group, extension to full rank.  The
    first failing stage is reported with its witness.
    """
    verdict = check_small_three_faces(g)
    if not verdict:
        return BottReport(False, "small_three_faces", verdict.witness, None, None)
    search = find_acs_lift(g)
    if not search.ok:
        return BottReport(False, "acs_lift", search.witness, None, None)
    try:
        cov = build_covering(g)
    except NotProductOfSimplices as exc:
        return BottReport(False, "covering", exc.witness, None, search.lift)
    factors = tuple(f.size for f in cov.factors)
    if any(f.kind != "delta" for f in cov.factors):
        return BottReport(
            False,
            "delta_factors",
            {"factors": [(f.kind, f.size) for f in cov.factors]},
            factors,
            search.lift,
        )
    deck = deck_group(cov)
    if not deck.is_trivial:
        return BottReport(
            False, "deck_group", {"order": deck.order}, factors, search.lift
        )
    try:
        extend_to_gkm_n(g)
    except Exception as exc:
        witness = getattr(exc, "witness", None) or {"error": str(exc)}
        return BottReport(False, "extension", witness, factors, search.lift)
    return BottReport(True, None, None, factors, search.lift)
