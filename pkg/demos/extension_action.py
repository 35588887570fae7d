"""Extend a rank-deficient labeling to full rank and act on it by the deck group.

Walks the main example end to end: quotient of five twisted 2-spheres,
its double cover by I^5, extension of the pulled-back rank-4 labels to
rank 5, the induced deck action on the weight lattice, and the bound
this puts on torus symmetry.
"""

from gkmkit.covering import build_covering, deck_group, pull_back_labels
from gkmkit.extension import extend_to_gkm_n, induced_weight_action
from gkmkit.models import hypercube_involution_model
from gkmkit.pipeline import torus_upper_bound


def main():
    g = hypercubemodel().quotient.graph
    print("quotient: %d vertices, rank %d, valence %d"
          % (len(g.vertices), g.torus_rank, g.valence))

    cov = build_covering(g)
    pulled = pull_back_labels(cov)
    ext = extend_to_gkm_n(pulled.graph)
    print("extension base %s, basis edges %s"
          % (ext.base_vertex, list(ext.basis_edges)))
    print("projection phi:")
    for row in ext.phi:
        print("  ", tuple(str(c) for c in row))

    deck = deck_group(cov)
    autos = [pulled.automorphism(d) for d in deck.elements]
    action = induced_weight_action(ext, autos)
    print("deck action on the rank-%d lattice:" % len(action.matrices[0]))
    for mat in action.matrices:
        print("  ", [tuple(str(c) for c in row) for row in mat])
    print("lattice denominator:", action.lattice.denominator)
    print("torus symmetry bound:", torus_upper_bound(pulled, deck))


def hypercubemodel():
    return hypercube_involution_model(5)


if __name__ == "__main__":
    main()
