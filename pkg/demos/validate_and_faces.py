"""Validate a model graph and census its small faces."""

from gkmkit.faces import (
    check_connection_identities,
    check_small_three_faces,
    classify_three_face,
    classify_two_face,
    enumerate_faces,
)
from gkmkit.graph import gkm_order, validate_structure
from gkmkit.models import standard_product_model
from gkmkit.covering import Factor


def census(g, dim, classify):
    counts = {}
    for f in enumerate_faces(g, dim):
        kind = classify(g, f)
        counts[kind] = counts.get(kind, 0) + 1
    return counts


def main():
    g = standard_product_model(
        (Factor("delta", 2), Factor("sigma", 2))
    )
    report = validate_structure(g)
    print("valid:", report.ok)
    for check in report.checks:
        print("  %-20s %s" % (check.name, "ok" if check.passed else check.witness))
    print("gkm order:", gkm_order(g))
    print("2-faces:", census(g, 2, classify_two_face))
    print("3-faces:", census(g, 3, classify_three_face))
    print("3-face types admissible:", bool(check_small_three_faces(g)))
    print("connection identities:", bool(check_connection_identities(g)))


if __name__ == "__main__":
    main()
