"""Graph constructions: extremal examples, regular embeddings, blow-ups,
squared line graphs and a few standard families."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import as_fraction
from .graph import Graph

MAX_REGULARIZE_VERTICES = 1 << 20


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def petersen_graph() -> Graph:
    import networkx as nx

    return Graph.from_networkx(nx.petersen_graph())


def chvatal_graph() -> Graph:
    import networkx as nx

    return Graph.from_networkx(nx.chvatal_graph())


def connected_graphs(max_vertices: int) -> list[Graph]:
    """Every connected graph on 1..max_vertices vertices up to isomorphism (max 7)."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    if max_vertices > 7:
        raise ValueError("the graph atlas stops at 7 vertices")
    return [
        Graph.from_networkx(h)
        for h in graph_atlas_g()
        if 1 <= h.number_of_nodes() <= max_vertices and nx.is_connected(h)
    ]


def random_regular_graph(d: int, n: int, seed: int) -> Graph:
    import networkx as nx

    return Graph.from_networkx(nx.random_regular_graph(d, n, seed=seed))


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    import networkx as nx

    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def projective_plane_incidence(q: int) -> Graph:
    """Point-line incidence graph of the projective plane over GF(q), q prime.

    (q+1)-regular and bipartite with girth 6; points are ``0..q^2+q`` and
    lines follow.
    """
    if q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        raise ValueError("q must be prime")
    reps = []
    for x in range(q):
        for y in range(q):
            reps.append((1, x, y))
    for y in range(q):
        reps.append((0, 1, y))
    reps.append((0, 0, 1))
    m = len(reps)
    edges = [
        (i, m + j)
        for i, a in enumerate(reps)
        for j, b in enumerate(reps)
        if (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) % q == 0
    ]
    return Graph.from_edges(2 * m, edges)


def blow_up(g: Graph, copies: int) -> Graph:
    """Replace each vertex by ``copies`` independent copies; copy ``i`` of ``v``
    is vertex ``i * n + v`` and copies of adjacent vertices are all adjacent."""
    n = g.n
    edges = [
        (i * n + u, j * n + v)
        for u, v in g.edges()
        for i in range(copies)
        for j in range(copies)
    ]
    return Graph.from_edges(n * copies, edges)


def sharpness_clique_size(delta: int, sigma) -> int:
    """``max{1, floor(sqrt(1 - sigma) * delta)}``, computed exactly."""
    s = as_fraction(sigma)
    x = (1 - s) * delta * delta
    return max(1, math.isqrt(math.floor(x)))


def sharpness_construction(delta: int, sigma) -> Graph:
    """Clique of size q with ``delta + 1 - q`` pendant leaves on each clique vertex.

    Clique vertices are ``0..q-1`` and have degree exactly ``delta``.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    s = as_fraction(sigma)
    if not 0 <= s <= 1:
        raise ValueError("sigma must lie in [0, 1]")
    q = sharpness_clique_size(delta, s)
    pend = delta + 1 - q
    edges = [(u, v) for u in range(q) for v in range(u + 1, q)]
    for i in range(q):
        edges += [(i, q + i * pend + j) for j in range(pend)]
    return Graph.from_edges(q + q * pend, edges)


def regularize(g: Graph, target_delta: int) -> Graph:
    """Embed ``g`` as an induced subgraph of a ``target_delta``-regular graph.

    Doubles the graph and joins each deficient vertex to its mirror until
    regular.  Mirror edges create no triangles, so sparsity never drops.
    """
    if target_delta < g.max_degree:
        raise ValueError("target_delta below the maximum degree")
    if g.n == 0:
        return g
    adj = [set(a) for a in g.adjacency]
    while any(len(a) != target_delta for a in adj):
        n = len(adj)
        if 2 * n > MAX_REGULARIZE_VERTICES:
            raise ValueError(f"regularization exceeds {MAX_REGULARIZE_VERTICES} vertices")
        mirror = [{u + n for u in a} for a in adj]
        for v in range(n):
            if len(adj[v]) < target_delta:
                adj[v].add(v + n)
                mirror[v].add(v)
        adj.extend(mirror)
    return Graph(len(adj), tuple(tuple(sorted(a)) for a in adj))


@dataclass(frozen=True)
class ListAssignment:
    """Per-vertex colour lists plus the smallest colour id not yet handed out."""

    lists: tuple[frozenset[int], ...]
    next_fresh_colour: int

    def __post_init__(self):
        top = max((max(l) for l in self.lists if l), default=-1)
        if self.next_fresh_colour <= top:
            raise ValueError("next_fresh_colour must exceed every listed colour")

    @classmethod
    def uniform(cls, n: int, k: int, start: int = 0) -> "ListAssignment":
        base = frozenset(range(start, start + k))
        return cls(tuple(base for _ in range(n)), start + k)

    @classmethod
    def from_lists(cls, lists) -> "ListAssignment":
        lists = tuple(frozenset(int(c) for c in l) for l in lists)
        top = max((max(l) for l in lists if l), default=-1)
        return cls(lists, top + 1)

    def sizes(self) -> list[int]:
        return [len(l) for l in self.lists]

    def __len__(self) -> int:
        return len(self.lists)

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.lists[v]


def colourwise_regularize(
    g: Graph, lists: ListAssignment, delta: int
) -> tuple[Graph, ListAssignment]:
    """Supergraph in which every colour class of the lists induces a
    ``delta``-regular graph with the sparsity of ``g``.

    First :func:`regularize`, then an ``N/k`` blow-up whose copies of a vertex
    have lists partitioning ``0..N-1``; copy 0 keeps the original list and the
    remaining colours go to copies 1, 2, ... in ascending order.
    """
    sizes = set(lists.sizes())
    if len(sizes) > 1:
        raise ValueError(f"inconsistent list sizes {sorted(sizes)}")
    if len(lists) != g.n:
        raise ValueError("one list per vertex required")
    if g.max_degree > delta:
        raise ValueError("delta below the maximum degree")
    if g.n == 0:
        return g, lists
    k = sizes.pop()
    if k == 0:
        raise ValueError("lists must be non-empty")
    h = regularize(g, delta)
    # every vertex of h is a mirror image of vertex (v mod n) of g
    base_lists = [lists[v % g.n] for v in range(h.n)]
    top = max(max(l) for l in lists.lists)
    big_n = k * math.ceil((top + 1) / k)
    copies = big_n // k
    hn = h.n
    new_lists = [None] * (hn * copies)
    for v in range(hn):
        own = base_lists[v]
        rest = sorted(set(range(big_n)) - own)
        new_lists[v] = own
        for i in range(1, copies):
            new_lists[i * hn + v] = frozenset(rest[(i - 1) * k : i * k])
    g1 = blow_up(h, copies)
    return g1, ListAssignment(tuple(new_lists), max(big_n, lists.next_fresh_colour))


def square_line_graph(g: Graph) -> tuple[Graph, list[tuple[int, int]]]:
    """``L(g)^2``: one vertex per edge of ``g`` (in ``g.edges()`` order); two are
    adjacent when the edges share an endpoint or are joined by an edge."""
    edges = g.edges()
    if not edges:
        raise ValueError("square_line_graph needs at least one edge")
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    adj = []
    for i, (a, b) in enumerate(edges):
        near = g.neighbour_sets[a] | g.neighbour_sets[b] | {a, b}
        s = set()
        for w in near:
            s.update(incident[w])
        s.discard(i)
        adj.append(tuple(sorted(s)))
    return Graph(len(edges), tuple(adj)), edges
