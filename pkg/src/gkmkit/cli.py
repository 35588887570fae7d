"""Command line front end.

    gkm <command> [arguments] [--format json|text]

Graph inputs use the JSON interchange format; the file argument "-"
reads standard input.  JSON reports carry "schema": 1 and are
byte-identical across runs on the same input.

Exit codes: 0 success, 1 a validation check failed, 2 the property the
command tests for was refuted, 3 unreadable input or bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import acs, cohomology, covering, faces, linalg, models, pipeline
from .errors import (
    FormalityViolation,
    GkmError,
    GraphFormatError,
    NoSuchClass,
    PipelineError,
)
from .extension import extend_to_gkm_n
from .graph import GkmGraph, infer_connection, validate_structure


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for refuted
    # properties here, so remap usage problems to the parse-error code.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(3)


# -- input and output helpers -------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str) -> GkmGraph:
    return GkmGraph.from_json(_read_text(path))


def _with_connection(g: GkmGraph) -> GkmGraph:
    return g if g.has_connection() else infer_connection(g)


def _jsonable(x):
    if isinstance(x, Fraction):
        return linalg.q_to_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=repr)
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def _emit(args, doc: dict, lines: Sequence[str]) -> None:
    fmt = getattr(args, "format", None) or "text"
    if fmt == "json":
        out = dict(doc)
        out["schema"] = 1
        print(json.dumps(_jsonable(out), sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _refuted(args, command: str, exc: GkmError, extra: Optional[dict] = None) -> int:
    doc = {
        "command": command,
        "refuted": {"message": str(exc), "witness": getattr(exc, "witness", None)},
    }
    if extra:
        doc.update(extra)
    _emit(args, doc, ["REFUTED: %s" % exc])
    return 2


def _vec_text(vec) -> str:
    return "(%s)" % ", ".join(linalg.q_to_str(c) for c in vec)


def _poly_text(p) -> str:
    """Sign-aware rendering of a homogeneous polynomial in x1..xk."""
    if p.is_zero():
        return "0"
    parts = []
    for mono in sorted(p.coeffs, reverse=True):
        c = p.coeffs[mono]
        body = "*".join(
            "x%d" % (i + 1) if e == 1 else "x%d^%d" % (i + 1, e)
            for i, e in enumerate(mono)
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


def _factor_text(factors) -> str:
    return " x ".join("%s:%d" % (f.kind, f.size) for f in factors)


# -- subcommands ---------------------------------------------------------------


def _cmd_validate(args) -> int:
    g = _load_graph(args.file)
    rep = validate_structure(g)
    doc = {
        "command": "validate",
        "ok": rep.ok,
        "gkm_order": rep.gkm_order,
        "checks": [
            {"name": c.name, "passed": c.passed, "witness": c.witness}
            for c in rep.checks
        ],
    }
    lines = []
    for c in rep.checks:
        if c.passed:
            lines.append("PASS %s" % c.name)
        else:
            lines.append(
                "FAIL %s  %s"
                % (c.name, json.dumps(_jsonable(c.witness), sort_keys=True))
            )
    lines.append("gkm order: %s" % ("-" if rep.gkm_order is None else rep.gkm_order))
    lines.append("ok" if rep.ok else "invalid")
    _emit(args, doc, lines)
    return 0 if rep.ok else 1


def _cmd_faces(args) -> int:
    g = _with_connection(_load_graph(args.file))
    if args.dim < 1 or args.dim > g.valence:
        raise GraphFormatError(
            "face dimension must be between 1 and the valence %d" % g.valence
        )
    found = faces.enumerate_faces(g, args.dim)
    rows = []
    for f in sorted(found, key=lambda f: tuple(sorted(f.vertices))):
        typ = None
        if args.dim == 2:
            typ = faces.classify_two_face(g, f)
        elif args.dim == 3:
            typ = faces.classify_three_face(g, f)
        rows.append({"vertices": sorted(f.vertices), "type": typ})
    doc = {"command": "faces", "dim": args.dim, "count": len(rows), "faces": rows}
    lines = ["%d face(s) of dimension %d" % (len(rows), args.dim)]
    for r in rows:
        label = r["type"] or "face"
        lines.append("  %-10s %s" % (label, " ".join(r["vertices"])))
    _emit(args, doc, lines)
    return 0


def _cmd_classify(args) -> int:
    g = _with_connection(_load_graph(args.file))
    two: dict = {}
    for f in faces.enumerate_faces(g, 2):
        t = faces.classify_two_face(g, f)
        two[t] = two.get(t, 0) + 1
    three: dict = {}
    if g.valence >= 3:
        for f in faces.enumerate_faces(g, 3):
            t = faces.classify_three_face(g, f)
            three[t] = three.get(t, 0) + 1
    verdict = faces.check_small_three_faces(g)
    doc = {
        "command": "classify",
        "two_faces": two,
        "three_faces": three,
        "small_three_faces": verdict.ok,
        "witness": verdict.witness,
    }
    lines = ["two-dimensional faces:"]
    lines += ["  %s: %d" % (t, two[t]) for t in sorted(two)] or ["  none"]
    lines.append("three-dimensional faces:")
    lines += ["  %s: %d" % (t, three[t]) for t in sorted(three)] or ["  none"]
    lines.append(
        "small three-dimensional faces: %s" % ("yes" if verdict.ok else "NO")
    )
    if not verdict.ok:
        lines.append(
            "  witness: %s" % json.dumps(_jsonable(verdict.witness), sort_keys=True)
        )
    _emit(args, doc, lines)
    return 0


def _cmd_cover(args) -> int:
    g = _with_connection(_load_graph(args.file))
    try:
        cov = covering.build_covering(g)
    except GkmError as exc:
        return _refuted(args, "cover", exc)
    doc = {
        "command": "cover",
        "factors": [[f.kind, f.size] for f in cov.factors],
        "degree": cov.degree,
        "base_vertex": cov.base_vertex,
        "product_vertices": len(cov.product.vertices),
    }
    lines = [
        "factors: %s" % _factor_text(cov.factors),
        "degree: %d" % cov.degree,
        "product vertices: %d over %d" % (len(cov.product.vertices), len(g.vertices)),
    ]
    _emit(args, doc, lines)
    return 0


def _cmd_deck(args) -> int:
    g = _with_connection(_load_graph(args.file))
    try:
        cov = covering.build_covering(g)
        grp = covering.deck_group(cov)
    except GkmError as exc:
        return _refuted(args, "deck", exc)
    ordered = sorted(
        grp.elements, key=lambda el: tuple(sorted((str(k), str(v)) for k, v in el.vertex_map.items()))
    )
    doc = {
        "command": "deck",
        "order": grp.order,
        "factors": [[f.kind, f.size] for f in cov.factors],
        "elements": [
            {str(k): str(v) for k, v in el.vertex_map.items()} for el in ordered
        ],
    }
    base = cov.product.base_point
    lines = ["order: %d" % grp.order]
    for i, el in enumerate(ordered):
        lines.append("element %d: %s -> %s" % (i, base, el.vertex_map[base]))
    _emit(args, doc, lines)
    return 0


def _cmd_extend(args) -> int:
    g = _with_connection(_load_graph(args.file))
    try:
        ext = extend_to_gkm_n(g)
    except GkmError as exc:
        return _refuted(args, "extend", exc)
    doc = {
        "command": "extend",
        "rank": g.valence,
        "input_rank": g.torus_rank,
        "base_vertex": ext.base_vertex,
        "basis_edges": list(ext.basis_edges),
        "beta": {uid: list(ext.beta[uid]) for uid in g.undirected_ids()},
        "phi": [list(row) for row in ext.phi],
    }
    lines = [
        "extended rank: %d (from %d)" % (g.valence, g.torus_rank),
        "base vertex: %s" % ext.base_vertex,
        "beta:",
    ]
    for uid in g.undirected_ids():
        lines.append("  %s: %s" % (uid, _vec_text(ext.beta[uid])))
    lines.append("phi:")
    for row in ext.phi:
        lines.append("  %s" % _vec_text(row))
    _emit(args, doc, lines)
    return 0


def _cmd_betti(args) -> int:
    g = _load_graph(args.file)
    try:
        rep = cohomology.betti_numbers(g)
    except FormalityViolation as exc:
        return _refuted(args, "betti", exc)
    doc = {
        "command": "betti",
        "equivariant": list(rep.equivariant),
        "betti": list(rep.betti),
        "total": rep.total,
        "vertices": len(g.vertices),
    }
    lines = [
        "equivariant dims: %s" % ", ".join(str(d) for d in rep.equivariant),
        "betti: (%s)" % ", ".join(str(b) for b in rep.betti),
        "total: %d (vertices: %d)" % (rep.total, len(g.vertices)),
    ]
    _emit(args, doc, lines)
    return 0


def _cmd_ring(args) -> int:
    g = _load_graph(args.file)
    try:
        rep = cohomology.betti_numbers(g)
    except FormalityViolation as exc:
        return _refuted(args, "ring", exc)
    doc = {
        "command": "ring",
        "equivariant": list(rep.equivariant),
        "betti": list(rep.betti),
        "total": rep.total,
    }
    lines = [
        "equivariant dims: %s" % ", ".join(str(d) for d in rep.equivariant),
        "betti: (%s)" % ", ".join(str(b) for b in rep.betti),
    ]
    if g.torus_rank == g.valence and g.valence >= 2:
        g = _with_connection(g)
        facets = sorted(
            faces.enumerate_faces(g, g.valence - 1),
            key=lambda f: tuple(sorted(f.vertices)),
        )
        table = []
        classes = []
        for i, f in enumerate(facets):
            row = {"name": "t%d" % i, "vertices": sorted(f.vertices)}
            try:
                cls = cohomology.facet_class(g, f)
            except NoSuchClass as exc:
                row["class"] = None
                row["note"] = str(exc)
                classes.append(None)
            else:
                row["class"] = {
                    v: _poly_text(p)
                    for v, p in sorted(cls.entries.items())
                    if not p.is_zero()
                }
                classes.append(cls)
            table.append(row)
        products = []
        for i, ci in enumerate(classes):
            for j in range(i, len(classes)):
                cj = classes[j]
                if ci is None or cj is None:
                    continue
                zero = cohomology.ordinary_zero_check(g, cohomology.multiply_classes(ci, cj))
                products.append(
                    {
                        "left": "t%d" % i,
                        "right": "t%d" % j,
                        "ordinary": "0" if zero else "nonzero",
                    }
                )
        doc["facets"] = table
        doc["products"] = products
        lines.append("facet classes:")
        for row in table:
            if row["class"] is None:
                lines.append("  %s (%s): none (%s)" % (row["name"], " ".join(row["vertices"]), row["note"]))
            else:
                support = ", ".join("%s: %s" % (v, s) for v, s in sorted(row["class"].items()))
                lines.append("  %s (%s): %s" % (row["name"], " ".join(row["vertices"]), support))
        lines.append("ordinary products:")
        for pr in products:
            lines.append("  %s * %s = %s" % (pr["left"], pr["right"], pr["ordinary"]))
    else:
        doc["facets"] = None
        doc["products"] = None
        lines.append("facet classes: skipped (needs torus rank = valence >= 2)")
    _emit(args, doc, lines)
    return 0


_MODEL_USAGE = (
    "model kinds: simplex <n> | sigma <m> | hirzebruch <a> | wp <a> <b> | "
    "hypercube <n> [--part total|reduced|quotient] | product <kind:size> ..."
)


def _model_ints(params: Sequence[str], count: int, kind: str) -> List[int]:
    if len(params) != count:
        raise GraphFormatError("%s takes %d integer argument(s)" % (kind, count))
    try:
        return [int(x) for x in params]
    except ValueError:
        raise GraphFormatError("%s arguments must be integers" % kind)


def _parse_factors(tokens: Sequence[str]):
    out = []
    for tok in tokens:
        kind, sep, num = tok.partition(":")
        if not sep or kind not in ("delta", "sigma"):
            raise GraphFormatError("factor %r: expected delta:<n> or sigma:<m>" % tok)
        try:
            size = int(num)
        except ValueError:
            raise GraphFormatError("factor %r: size must be an integer" % tok)
        if size < 1:
            raise GraphFormatError("factor %r: size must be positive" % tok)
        out.append(covering.Factor(kind, size))
    return out


def _cmd_model(args) -> int:
    kind, params = args.kind, args.params
    try:
        if kind == "simplex":
            (n,) = _model_ints(params, 1, kind)
            g = models.simplex_model(n)
        elif kind == "sigma":
            (m,) = _model_ints(params, 1, kind)
            g = models.sigma_model(m)
        elif kind == "hirzebruch":
            (a,) = _model_ints(params, 1, kind)
            g = models.hirzebruch_model(a)
        elif kind == "wp":
            a, b = _model_ints(params, 2, kind)
            g = models.weighted_projective_model(a, b)
        elif kind == "hypercube":
            (n,) = _model_ints(params, 1, kind)
            hm = models.hypercube_involution_model(n)
            g = {
                "total": hm.total,
                "reduced": hm.reduced,
                "quotient": hm.quotient.graph,
            }[args.part]
        elif kind == "product":
            if not params:
                raise GraphFormatError("product needs at least one factor")
            g = models.standard_product_model(_parse_factors(params))
        else:
            raise GraphFormatError(_MODEL_USAGE)
    except ValueError as exc:
        raise GraphFormatError(str(exc))
    print(g.to_json(indent=2))
    return 0


def _parse_bott_spec(doc) -> List[models.BottStage]:
    shape = 'expected {"stages": [{"n": int, "bundles": [[int, ...], ...]}, ...]}'
    if (
        not isinstance(doc, dict)
        or set(doc) != {"stages"}
        or not isinstance(doc["stages"], list)
        or not doc["stages"]
    ):
        raise GraphFormatError(shape)
    stages = []
    for j, st in enumerate(doc["stages"]):
        if not isinstance(st, dict) or set(st) != {"n", "bundles"}:
            raise GraphFormatError("stage %d: %s" % (j, shape))
        n, bundles = st["n"], st["bundles"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise GraphFormatError("stage %d: n must be a positive integer" % j)
        ok = (
            isinstance(bundles, list)
            and len(bundles) == n + 1
            and all(
                isinstance(b, list)
                and len(b) == j
                and all(isinstance(c, int) and not isinstance(c, bool) for c in b)
                for b in bundles
            )
        )
        if not ok:
            raise GraphFormatError(
                "stage %d: bundles must be %d integer vectors of length %d"
                % (j, n + 1, j)
            )
        first = bundles[0]
        twists = tuple(
            tuple(c - f for c, f in zip(b, first)) for b in bundles[1:]
        )
        stages.append(models.BottStage(n, twists))
    return stages


def _cmd_bott(args) -> int:
    doc_in = json.loads(_read_text(args.file))
    ring = models.bott_tower_cohomology(_parse_bott_spec(doc_in))
    relations = [models.poly_string(r) for r in ring.relations]
    doc = {
        "command": "bott",
        "stages": [
            {"dim": st.dim, "twists": [list(t) for t in st.twists]}
            for st in ring.stages
        ],
        "relations": relations,
        "betti": list(ring.betti()),
        "total": ring.total_rank,
    }
    lines = ["generators: %s" % ", ".join("x%d" % i for i in range(ring.rank))]
    lines.append("relations:")
    lines += ["  %s = 0" % r for r in relations]
    lines.append("betti: (%s)" % ", ".join(str(b) for b in ring.betti()))
    lines.append("total rank: %d" % ring.total_rank)
    _emit(args, doc, lines)
    return 0


def _cmd_acs(args) -> int:
    g = _with_connection(_load_graph(args.file))
    found = acs.find_acs_lift(g)
    if not found.ok:
        doc = {"command": "acs", "found": False, "witness": found.witness}
        lines = ["NO_LIFT: %s" % found.witness.get("reason", "unknown")]
        for entry in found.witness.get("cycle", ()):
            lines.append("  %s" % json.dumps(_jsonable(entry), sort_keys=True))
        for key in ("vertex", "base", "edge", "p", "q"):
            if key in found.witness:
                lines.append("  %s: %s" % (key, found.witness[key]))
        _emit(args, doc, lines)
        return 2
    lift = found.lift
    doc = {
        "command": "acs",
        "found": True,
        "orientation": dict(lift.orientation),
        "values": {uid: list(lift.values[uid]) for uid in g.undirected_ids()},
    }
    lines = ["LIFT_FOUND"]
    for uid in g.undirected_ids():
        sign = "+" if lift.orientation[uid] == 1 else "-"
        lines.append("  %s: %s %s" % (uid, sign, _vec_text(lift.values[uid])))
    _emit(args, doc, lines)
    return 0


def _cmd_pipeline(args) -> int:
    g = _with_connection(_load_graph(args.file))
    if args.verb == "model":
        try:
            rep = pipeline.build_model(g)
        except PipelineError as exc:
            doc = {
                "command": "pipeline",
                "verb": "model",
                "stage": exc.stage,
                "refuted": {"message": str(exc.cause), "witness": exc.witness},
            }
            _emit(args, doc, ["FAILED at stage %s: %s" % (exc.stage, exc.cause)])
            return 2
        doc = {
            "command": "pipeline",
            "verb": "model",
            "factors": [[k, s] for k, s in rep.factors],
            "degree": rep.degree,
            "deck_order": rep.deck_order,
            "equivariant": list(rep.betti.equivariant),
            "betti": list(rep.betti.betti),
            "invariant_betti": list(rep.invariant.betti),
            "total": rep.betti.total,
            "facet_labels": {k: list(v) for k, v in sorted(rep.facet_labels.items())},
            "torus_bound": rep.torus_bound,
        }
        lines = [
            "factors: %s" % " x ".join("%s:%d" % (k, s) for k, s in rep.factors),
            "covering degree: %d, deck order: %d" % (rep.degree, rep.deck_order),
            "betti: (%s)" % ", ".join(str(b) for b in rep.betti.betti),
            "invariant betti upstairs: (%s)"
            % ", ".join(str(b) for b in rep.invariant.betti),
            "facet labels:",
        ]
        for key, vec in sorted(rep.facet_labels.items()):
            lines.append("  %s: %s" % (key, _vec_text(vec)))
        lines.append("torus symmetry bound: %d" % rep.torus_bound)
        _emit(args, doc, lines)
        return 0
    try:
        rep = pipeline.classify_orbit_space(g)
    except PipelineError as exc:
        doc = {
            "command": "pipeline",
            "verb": "classify",
            "stage": exc.stage,
            "refuted": {"message": str(exc.cause), "witness": exc.witness},
        }
        _emit(args, doc, ["FAILED at stage %s: %s" % (exc.stage, exc.cause)])
        return 2
    doc = {
        "command": "pipeline",
        "verb": "classify",
        "kind": rep.kind,
        "factors": [[k, s] for k, s in rep.factors],
        "deck_order": rep.deck_order,
        "antipodal_hypercube": rep.antipodal_hypercube,
    }
    lines = [
        rep.kind,
        "factors: %s" % " x ".join("%s:%d" % (k, s) for k, s in rep.factors),
        "deck order: %d" % rep.deck_order,
    ]
    if rep.kind != "product":
        lines.append(
            "free antipodal hypercube quotient: %s"
            % ("yes" if rep.antipodal_hypercube else "no")
        )
    _emit(args, doc, lines)
    if args.expect_product and rep.kind != "product":
        return 2
    return 0


# -- driver --------------------------------------------------------------------


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("json", "text"),
        default=argparse.SUPPRESS,
        help="report format (default text)",
    )
    common.add_argument(
        "--jobs",
        type=int,
        default=argparse.SUPPRESS,
        help="accepted for interface stability; outputs never depend on it",
    )

    parser = _Parser(prog="gkm", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "text"), default=None)
    parser.add_argument("--jobs", type=int, default=None)
    sub = parser.add_subparsers(dest="command")

    def cmd(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = cmd("validate", _cmd_validate, "structural and axiom checks")
    p.add_argument("file")

    p = cmd("faces", _cmd_faces, "enumerate faces of one dimension")
    p.add_argument("file")
    p.add_argument("--dim", type=int, default=2)

    p = cmd("classify", _cmd_classify, "2- and 3-face census")
    p.add_argument("file")

    p = cmd("cover", _cmd_cover, "covering by a product of simplices")
    p.add_argument("file")

    p = cmd("deck", _cmd_deck, "deck transformation group of the covering")
    p.add_argument("file")

    p = cmd("extend", _cmd_extend, "extend labels to full rank")
    p.add_argument("file")

    p = cmd("betti", _cmd_betti, "Betti numbers via the free-module recursion")
    p.add_argument("file")

    p = cmd("ring", _cmd_ring, "cohomology summary with facet classes")
    p.add_argument("file")

    p = cmd("model", _cmd_model, "emit a standard model graph as JSON")
    p.add_argument("kind")
    p.add_argument("params", nargs="*")
    p.add_argument(
        "--part", choices=("total", "reduced", "quotient"), default="quotient"
    )

    p = cmd("bott", _cmd_bott, "Bott tower cohomology from a stage spec")
    p.add_argument("file")

    p = cmd("acs", _cmd_acs, "search for a consistent sign lift")
    p.add_argument("file")

    p = cmd("pipeline", _cmd_pipeline, "end-to-end model build or classification")
    p.add_argument("verb", choices=("model", "classify"))
    p.add_argument("file")
    p.add_argument("--expect-product", action="store_true")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 3
    try:
        return args.func(args)
    except (GraphFormatError, json.JSONDecodeError) as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return 3
    except OSError as exc:
        sys.stderr.write("io error: %s\n" % exc)
        return 3
    except GkmError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
