"""Graph builders and hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from odse.graph import Composite, LabeledGraph, RealVector, Symbol


def path_graph(coords, gid="", extra_edges=()):
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    edges = [(i, i + 1, None) for i in range(len(coords) - 1)] + [(a, b, None) for a, b in extra_edges]
    return LabeledGraph(tuple(RealVector(tuple(c)) for c in coords), tuple(edges), gid)


def point_graph(x, gid=""):
    """Single-vertex graph carrying a 1-D coordinate."""
    return LabeledGraph((RealVector((float(x),)),), (), gid)


def random_real_graph(rng, max_order=7, gid="", dim=2):
    n = int(rng.integers(1, max_order + 1))
    coords = rng.uniform(0.0, 3.0, (n, dim))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4]
    return LabeledGraph(tuple(RealVector(tuple(c)) for c in coords), tuple((a, b, None) for a, b in pairs), gid)


def random_symbol_graph(rng, max_order=7, gid="", alphabet="CNOS"):
    n = int(rng.integers(1, max_order + 1))
    verts = tuple(Symbol(alphabet[int(i)]) for i in rng.integers(len(alphabet), size=n))
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                edges.append((a, b, Symbol("12"[int(rng.integers(2))]) if rng.random() < 0.7 else None))
    return LabeledGraph(verts, tuple(edges), gid)


coordinate = st.floats(0.0, 3.0, allow_nan=False, allow_infinity=False)
real_labels = st.lists(coordinate, min_size=2, max_size=2).map(lambda v: RealVector(tuple(v)))
symbol_labels = st.sampled_from("CNOSH").map(Symbol)
composite_labels = st.builds(lambda xy, s: Composite((("xy", xy), ("type", s))), real_labels, symbol_labels)


@st.composite
def graphs(draw, labels=real_labels, max_order=6, edge_labels=st.none()):
    n = draw(st.integers(1, max_order))
    verts = tuple(draw(labels) for _ in range(n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    edges = tuple((a, b, draw(edge_labels)) for a, b in chosen)
    return LabeledGraph(verts, edges, draw(st.text("abc", max_size=3)))
