"""Simple undirected graphs and their text formats."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Malformed graph text.  ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class VertexRangeError(GraphFormatError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..vertex_count-1``.

    ``adjacency[v]`` is the ascending tuple of neighbours of ``v``.  Use
    :meth:`from_edges` unless the adjacency is already canonical.
    """

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise ValueError("adjacency length does not match vertex_count")
        for v, nbrs in enumerate(self.adjacency):
            if any(b <= a for a, b in zip(nbrs, nbrs[1:])):
                raise ValueError(f"neighbours of {v} not strictly ascending")
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if not 0 <= u < self.vertex_count:
                    raise VertexRangeError(f"neighbour {u} of {v} out of range")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if v not in self.neighbour_sets[u]:
                    raise ValueError(f"adjacency not symmetric at {u}-{v}")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build from an edge iterable; duplicates are merged, self-loops rejected."""
        nbrs: list[set[int]] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise VertexRangeError(f"edge {u}-{v} outside 0..{vertex_count - 1}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(vertex_count, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def empty(cls, vertex_count: int) -> "Graph":
        return cls(vertex_count, tuple(() for _ in range(vertex_count)))

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return self.vertex_count

    @cached_property
    def neighbour_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    @cached_property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbour_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    def is_regular(self, d: int | None = None) -> bool:
        if self.vertex_count == 0:
            return True
        lo, hi = int(self.degrees.min()), int(self.degrees.max())
        return lo == hi and (d is None or lo == d)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays, int64, for the kernels."""
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (u for nb in self.adjacency for u in nb), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    @cached_property
    def sparse_adjacency(self) -> sp.csr_matrix:
        indptr, indices = self.csr
        data = np.ones(len(indices), dtype=np.int64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Subgraph induced on ``vertices``; returns it with the new-to-old id map."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        adj = tuple(
            tuple(index[u] for u in self.adjacency[v] if u in index) for v in keep
        )
        return Graph(len(keep), adj), keep

    def to_networkx(self):
        import networkx as nx

        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges())
        return h

    @classmethod
    def from_networkx(cls, h) -> "Graph":
        nodes = sorted(h.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in h.edges()))


# -- text formats ------------------------------------------------------

FORMATS = ("edge-list", "dimacs")
_VERTICES_DIRECTIVE = re.compile(r"#\s*vertices\s*[:=]?\s*(\d+)\s*$")


def _parse_edge_list(text: str) -> Graph:
    declared = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _VERTICES_DIRECTIVE.match(line)
            if m:
                declared = int(m.group(1))
            continue
        line = line.split("#", 1)[0]
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {raw.strip()!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {raw.strip()!r}", lineno) from None
        if u < 0 or v < 0:
            raise VertexRangeError(f"negative vertex id in {raw.strip()!r}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        edges.append((u, v, lineno))
    n = max((max(u, v) + 1 for u, v, _ in edges), default=0)
    if declared is not None:
        for u, v, lineno in edges:
            if max(u, v) >= declared:
                raise VertexRangeError(f"vertex {max(u, v)} >= declared {declared}", lineno)
        n = declared
    return Graph.from_edges(n, ((u, v) for u, v, _ in edges))


def _parse_dimacs(text: str) -> Graph:
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise GraphFormatError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphFormatError(f"bad problem line {line!r}", lineno)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphFormatError(f"bad problem line {line!r}", lineno) from None
        elif tag == "e":
            if n is None:
                raise GraphFormatError("edge before problem line", lineno)
            if len(parts) != 3:
                raise GraphFormatError(f"expected 'e u v', got {line!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(f"non-integer vertex in {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise VertexRangeError(f"vertex outside 1..{n} in {line!r}", lineno)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise GraphFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p edge n m' line")
    return Graph.from_edges(n, edges)


def parse_graph(text: str, format: str = "edge-list") -> Graph:
    if format == "edge-list":
        return _parse_edge_list(text)
    if format == "dimacs":
        return _parse_dimacs(text)
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def serialize_graph(g: Graph, format: str = "edge-list") -> str:
    """Canonical text: edges in lexicographic ``u < v`` order."""
    if format == "edge-list":
        lines = [f"# vertices: {g.n}"]
        lines += [f"{u} {v}" for u, v in g.edges()]
    elif format == "dimacs":
        lines = [f"p edge {g.n} {g.edge_count}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    return "\n".join(lines) + "\n"


def guess_format(path: str | Path) -> str:
    return "dimacs" if Path(path).suffix.lower() in (".col", ".dimacs") else "edge-list"


def read_graph(path: str | Path, format: str | None = None) -> Graph:
    return parse_graph(Path(path).read_text(), format or guess_format(path))


def write_graph(g: Graph, path: str | Path, format: str | None = None) -> None:
    Path(path).write_text(serialize_graph(g, format or guess_format(path)))
