"""Exact structural measurements: local sparsity, codegree, quasirandomness,
degree cores and the independent pairs/triples of a neighbourhood."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph import Graph


def comb2(x: int) -> int:
    return x * (x - 1) // 2 if x >= 2 else 0


def as_fraction(x) -> Fraction:
    """Exact rational from int/Fraction/str, or from a float via its shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def rational_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


# -- sparsity ------------------------------------------------------------


def neighbourhood_edge_counts(g: Graph) -> np.ndarray:
    """``e(G[N(v)])`` for every vertex: the number of triangles through ``v``."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    a = g.sparse_adjacency
    tri = (a @ a).multiply(a).sum(axis=1)
    return np.asarray(tri, dtype=np.int64).ravel() // 2


@dataclass(frozen=True)
class SparsityReport:
    max_degree: int
    per_vertex_neighbourhood_edges: tuple[int, ...]
    sigma: Fraction
    worst_vertex: int | None

    def local_sigma(self, v: int) -> Fraction:
        return _sigma_from(self.per_vertex_neighbourhood_edges[v], self.max_degree)

    def to_json(self) -> dict:
        return {
            "sigma": rational_json(self.sigma),
            "max_degree": self.max_degree,
            "per_vertex": list(self.per_vertex_neighbourhood_edges),
            "worst_vertex": self.worst_vertex,
        }


def _sigma_from(edges: int, delta: int) -> Fraction:
    if delta <= 1:
        return Fraction(1)
    return 1 - Fraction(edges, comb2(delta))


def sigma_sparsity(g: Graph) -> SparsityReport:
    """Largest sigma with every neighbourhood spanning at most (1-sigma)C(Delta,2) edges."""
    counts = neighbourhood_edge_counts(g)
    delta = g.max_degree
    if g.n == 0:
        return SparsityReport(0, (), Fraction(1), None)
    worst = int(np.argmax(counts))
    return SparsityReport(
        delta, tuple(int(c) for c in counts), _sigma_from(int(counts[worst]), delta), worst
    )


def local_sigma(g: Graph, r: int, delta: int | None = None) -> Fraction:
    """Sparsity of the neighbourhood of ``r`` measured against ``delta`` (default Delta(g))."""
    nb = g.neighbour_sets[r]
    edges = sum(len(nb & g.neighbour_sets[u]) for u in nb) // 2
    return _sigma_from(edges, g.max_degree if delta is None else delta)


# -- codegree ------------------------------------------------------------


@dataclass(frozen=True)
class CodegreeReport:
    max_codegree: int
    max_degree: int
    sigma_hat: Fraction
    worst_pair: tuple[int, int] | None

    def to_json(self) -> dict:
        return {
            "max_codegree": self.max_codegree,
            "max_degree": self.max_degree,
            "sigma_hat": rational_json(self.sigma_hat),
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
        }


def max_codegree(g: Graph) -> CodegreeReport:
    delta = g.max_degree
    if g.n < 2:
        return CodegreeReport(0, delta, Fraction(1), None)
    a = g.sparse_adjacency
    common = (a @ a).tocoo()
    off = common.row < common.col
    if not off.any():
        lam, pair = 0, None
    else:
        rows, cols, vals = common.row[off], common.col[off], common.data[off]
        order = np.lexsort((cols, rows, -vals))
        i = order[0]
        lam, pair = int(vals[i]), (int(rows[i]), int(cols[i]))
    sigma_hat = Fraction(1) if delta == 0 else 1 - Fraction(lam, delta)
    return CodegreeReport(lam, delta, sigma_hat, pair)


# -- quasirandomness -------------------------------------------------------


@dataclass(frozen=True)
class QuasirandomSlack:
    """Tolerance for the quasirandomness test as a function of Delta.

    ``paper``: sqrt(D) ln(D)^5.  ``scaled``: c sqrt(D) ln(D)^p.  ``absolute``: t.
    """

    kind: str = "paper"
    c: float = 1.0
    p: float = 5.0
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ("paper", "scaled", "absolute"):
            raise ValueError(f"unknown slack kind {self.kind!r}")

    def __call__(self, delta: int) -> float:
        if self.kind == "absolute":
            return float(self.t)
        if delta <= 1:
            return 0.0
        c, p = (1.0, 5.0) if self.kind == "paper" else (self.c, self.p)
        return c * math.sqrt(delta) * math.log(delta) ** p

    def to_json(self) -> dict:
        return {"kind": self.kind, "c": self.c, "p": self.p, "t": self.t}

    @classmethod
    def parse(cls, text: str) -> "QuasirandomSlack":
        """``paper`` | ``scaled:c,p`` | ``absolute:t``."""
        kind, _, rest = text.partition(":")
        if kind == "paper":
            return cls()
        if kind == "scaled":
            c, p = (float(x) for x in rest.split(","))
            return cls("scaled", c=c, p=p)
        if kind == "absolute":
            return cls("absolute", t=float(rest))
        raise ValueError(f"bad slack spec {text!r}")


@dataclass(frozen=True)
class QuasirandomReport:
    subset_size: int
    mu: float
    threshold: float
    max_deviation: float
    worst_pair: tuple[int, int] | None
    violations: int
    passed: bool

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["worst_pair"] = list(self.worst_pair) if self.worst_pair else None
        return d


def quasirandom_check(
    g: Graph,
    subset: Iterable[int],
    mu: float | Fraction,
    slack: QuasirandomSlack | float | None = None,
    delta: int | None = None,
) -> QuasirandomReport:
    """Deviation of ``|N(u) & N(v) & S|`` from ``mu |N(u) & N(v)|`` over all u, v in S.

    A plain number for ``slack`` is an absolute tolerance.
    """
    if not 0 <= mu <= 1:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    if slack is None:
        slack = QuasirandomSlack()
    delta = g.max_degree if delta is None else delta
    threshold = slack(delta) if isinstance(slack, QuasirandomSlack) else float(slack)
    s = np.array(sorted(set(subset)), dtype=np.int64)
    if len(s) == 0:
        return QuasirandomReport(0, float(mu), threshold, 0.0, None, 0, True)
    a = g.sparse_adjacency
    rows = a[s, :]
    full = (rows @ rows.T).toarray()
    inner = rows[:, s]
    within = (inner @ inner.T).toarray()
    dev = np.abs(within - float(mu) * full)
    iu = np.triu_indices(len(s))
    flat = dev[iu]
    k = int(np.argmax(flat))
    worst = (int(s[iu[0][k]]), int(s[iu[1][k]]))
    violations = int(np.count_nonzero(flat > threshold))
    return QuasirandomReport(
        len(s), float(mu), threshold, float(flat[k]), worst, violations, violations == 0
    )


# -- min-degree core -----------------------------------------------------


def min_degree_core(g: Graph, d: int) -> tuple[list[int], list[int]]:
    """Peel vertices of degree < d until none remain.

    Returns ``(core, peel_order)``; the core is the unique maximum vertex set
    inducing minimum degree >= d.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    deg = [len(a) for a in g.adjacency]
    removed = [False] * g.n
    queued = [False] * g.n
    queue = deque()
    for v in range(g.n):
        if deg[v] < d:
            queue.append(v)
            queued[v] = True
    order = []
    while queue:
        v = queue.popleft()
        removed[v] = True
        order.append(v)
        for u in g.adjacency[v]:
            if not removed[u]:
                deg[u] -= 1
                if deg[u] < d and not queued[u]:
                    queued[u] = True
                    queue.append(u)
    core = [v for v in range(g.n) if not removed[v]]
    return core, order


def smallest_last_order(g: Graph, vertices: Iterable[int] | None = None) -> list[int]:
    """Smallest-last (degeneracy) colouring order of the subgraph induced by ``vertices``.

    Repeatedly removes a minimum-degree vertex (smallest id on ties); the
    returned list is the reverse of the removal order.
    """
    import heapq

    alive = set(range(g.n)) if vertices is None else set(vertices)
    deg = {v: sum(1 for u in g.adjacency[v] if u in alive) for v in alive}
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    removal = []
    while heap:
        d, v = heapq.heappop(heap)
        if v not in alive or deg[v] != d:
            continue
        alive.discard(v)
        removal.append(v)
        for u in g.adjacency[v]:
            if u in alive:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    removal.reverse()
    return removal


# -- independent pairs and triples -----------------------------------------


@dataclass(frozen=True)
class NeighbourhoodIndependence:
    root: int
    delta: int
    pairs: tuple[tuple[int, int, Fraction], ...]
    triple_count: int
    sigma_r: Fraction
    rivin_bound: float
    rivin_holds: bool


def independent_pairs_and_triples(g: Graph, r: int) -> NeighbourhoodIndependence:
    """Non-adjacent pairs of N(r) with ``l_uv = |N(u) & N(v)| / Delta`` and the
    number of independent triples, checked against sigma_r^{3/2} C(Delta, 3)."""
    delta = g.max_degree
    nb = list(g.adjacency[r])
    sets = g.neighbour_sets
    pos = {v: i for i, v in enumerate(nb)}
    # bit i of nonadj[j] set iff nb[i], nb[j] distinct and non-adjacent
    full = (1 << len(nb)) - 1
    nonadj = []
    for j, v in enumerate(nb):
        mask = full & ~(1 << j)
        for u in sets[v]:
            i = pos.get(u)
            if i is not None:
                mask &= ~(1 << i)
        nonadj.append(mask)
    pairs = []
    triples = 0
    for j, v in enumerate(nb):
        later = nonadj[j] >> (j + 1)
        i = j + 1
        while later:
            if later & 1:
                u = nb[i]
                ell = Fraction(len(sets[v] & sets[u]), delta)
                pairs.append((v, u, ell))
                triples += bin((nonadj[j] & nonadj[i]) >> (i + 1)).count("1")
            later >>= 1
            i += 1
    sigma_r = local_sigma(g, r, delta)
    c3 = math.comb(delta, 3)
    bound = float(sigma_r) ** 1.5 * c3
    holds = triples * triples <= sigma_r**3 * c3 * c3
    return NeighbourhoodIndependence(r, delta, tuple(pairs), triples, sigma_r, bound, holds)
