"""Betti numbers from the free-module recursion, and facet class products."""

from gkmkit.cohomology import (
    betti_numbers,
    facet_class,
    multiply_classes,
    ordinary_zero_check,
)
from gkmkit.faces import enumerate_faces
from gkmkit.models import (
    hirzebruch_model,
    simplex_model,
    sigma_model,
    standard_product_model,
)
from gkmkit.covering import Factor


def main():
    for name, g in [
        ("CP^3 graph", simplex_model(3)),
        ("S^6 graph", sigma_model(3)),
        ("Hirzebruch surface", hirzebruch_model(1)),
    ]:
        rep = betti_numbers(g)
        print("%-20s equivariant %s  betti %s  total %d"
              % (name, rep.equivariant, rep.betti, rep.total))

    # Davis-Januszkiewicz style relations on the square: opposite facets
    # multiply to zero in ordinary cohomology, adjacent ones do not
    g = standard_product_model((Factor("delta", 1), Factor("delta", 1)))
    facets = enumerate_faces(g, 1)
    classes = [facet_class(g, f) for f in facets]
    print("square facets:", [sorted(f.vertices) for f in facets])
    for i in range(len(facets)):
        for j in range(i + 1, len(facets)):
            disjoint = not (set(facets[i].vertices) & set(facets[j].vertices))
            product = multiply_classes(classes[i], classes[j])
            zero = ordinary_zero_check(g, product)
            print("  %s * %s -> %s (facets %s)"
                  % (sorted(facets[i].vertices), sorted(facets[j].vertices),
                     "0" if zero else "nonzero",
                     "opposite" if disjoint else "adjacent"))


if __name__ == "__main__":
    main()
