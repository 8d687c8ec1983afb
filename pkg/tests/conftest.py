from __future__ import annotations

import random

from hypothesis import strategies as st

from sparsecol import Graph, gnp_graph, random_regular_graph


@st.composite
def graphs(draw, max_vertices: int = 12, min_vertices: int = 0):
    n = draw(st.integers(min_vertices, max_vertices))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph.from_edges(n, chosen)


def random_graph(rng: random.Random, max_n: int = 200, max_delta: int = 20, seed: int = 0) -> Graph:
    """G(n, p) or random regular, rejected until the maximum degree fits."""
    while True:
        n = rng.randint(5, max_n)
        if seed % 4 == 0:
            d = rng.randint(1, min(max_delta, n - 1))
            if n * d % 2:
                continue
            g = random_regular_graph(d, n, seed=seed)
        else:
            p = rng.uniform(0.01, min(1.0, 0.7 * max_delta / n))
            g = gnp_graph(n, p, seed=seed)
        if g.max_degree <= max_delta:
            return g
        seed += 7919
