"""Brute-force ground truth for small graphs.

Nothing here calls into the sampler or colouring code; these routines exist
to check them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .analysis import rational_json
from .constructions import square_line_graph
from .graph import Graph

CHROMATIC_CAP = 24
SAMPLER_CAP = 12
PERMUTATION_CAP = 10
STRONG_EDGE_CAP = 24


class OracleSizeError(ValueError):
    pass


# -- chromatic number ------------------------------------------------------


def _max_clique(nbr: list[int], n: int) -> int:
    best = 0

    def expand(size: int, cand: int):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        while cand:
            if size + bin(cand).count("1") <= best:
                return
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            expand(size + 1, cand & nbr[v])

    expand(0, (1 << n) - 1)
    return best


def _colourable(nbr: list[int], n: int, k: int) -> bool:
    colour = [-1] * n
    deg = [bin(m).count("1") for m in nbr]

    def pick() -> int:
        best, key = -1, None
        for v in range(n):
            if colour[v] >= 0:
                continue
            sat = len({colour[u] for u in range(n) if nbr[v] >> u & 1 and colour[u] >= 0})
            cand = (sat, deg[v])
            if key is None or cand > key:
                best, key = v, cand
        return best

    def solve(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        taken = {colour[u] for u in range(n) if nbr[v] >> u & 1 and colour[u] >= 0}
        for c in range(min(k, used + 1)):
            if c in taken:
                continue
            colour[v] = c
            if solve(done + 1, max(used, c + 1)):
                return True
        colour[v] = -1
        return False

    return solve(0, 0)


def brute_chromatic(g: Graph, cap: int = CHROMATIC_CAP) -> int:
    """Exact chromatic number by DSATUR backtracking from the clique bound up."""
    if g.n > cap:
        raise OracleSizeError(f"{g.n} vertices exceeds the cap of {cap}")
    if g.n == 0:
        return 0
    nbr = [sum(1 << u for u in a) for a in g.adjacency]
    k = max(1, _max_clique(nbr, g.n))
    while not _colourable(nbr, g.n, k):
        k += 1
    return k


def brute_strong_index(g: Graph, cap: int = STRONG_EDGE_CAP) -> int:
    """Strong chromatic index as the chromatic number of the squared line graph."""
    if g.edge_count > cap:
        raise OracleSizeError(f"{g.edge_count} edges exceeds the cap of {cap}")
    if g.edge_count == 0:
        return 0
    h, _ = square_line_graph(g)
    return brute_chromatic(h, cap=cap)


# -- exact sampler distribution ------------------------------------------------


@dataclass(frozen=True)
class _SubsetTally:
    size: int
    orderings: int  # number of orderings enumerated (size! or 0 when skipped)
    vertex_hits: tuple[int, ...]  # orderings in which v ends up in I
    root_hits: tuple[tuple[int, int, int, int], ...]  # per vertex: (nonempty, |I_r|, P_r, T_r) sums


@lru_cache(maxsize=64)
def _tallies(g: Graph, cap: int) -> tuple[_SubsetTally, ...]:
    n = g.n
    out = []
    for mask in range(1 << n):
        members = [v for v in range(n) if mask >> v & 1]
        k = len(members)
        if k > cap:
            out.append(_SubsetTally(k, 0, (), ()))
            continue
        inner = {v: [u for u in g.adjacency[v] if mask >> u & 1] for v in members}
        vhits = [0] * n
        rhits = [[0, 0, 0, 0] for _ in range(n)]
        rank = [0] * n
        for perm in itertools.permutations(members):
            for i, v in enumerate(perm):
                rank[v] = i
            ind = [False] * n
            for v in members:
                rv = rank[v]
                if all(rank[u] < rv for u in inner[v]):
                    ind[v] = True
                    vhits[v] += 1
            for r in range(n):
                s = sum(1 for u in g.adjacency[r] if ind[u])
                if s:
                    h = rhits[r]
                    h[0] += 1
                    h[1] += s
                    h[2] += s * (s - 1) // 2
                    h[3] += s * (s - 1) * (s - 2) // 6
        out.append(_SubsetTally(k, math.factorial(k), tuple(vhits), tuple(map(tuple, rhits))))
    return tuple(out)


@dataclass(frozen=True)
class ExactSamplerStats:
    activation_probability: Fraction
    p_in: tuple[Fraction, ...]
    e_ir: tuple[Fraction | None, ...]
    e_pairs: tuple[Fraction | None, ...]
    e_triples: tuple[Fraction | None, ...]
    p_nonempty: tuple[Fraction | None, ...]
    skipped_subsets: int
    permutation_cap: int

    def inclusion_exclusion_holds(self, r: int) -> bool:
        if self.p_nonempty[r] is None:
            return True
        return self.p_nonempty[r] <= self.e_ir[r] - self.e_pairs[r] + self.e_triples[r]

    def to_json(self) -> dict:
        def enc(x):
            return None if x is None else rational_json(x)

        return {
            "activation_probability": enc(self.activation_probability),
            "p_in": [enc(x) for x in self.p_in],
            "e_ir": [enc(x) for x in self.e_ir],
            "e_pairs": [enc(x) for x in self.e_pairs],
            "e_triples": [enc(x) for x in self.e_triples],
            "p_nonempty": [enc(x) for x in self.p_nonempty],
            "skipped_subsets": self.skipped_subsets,
            "permutation_cap": self.permutation_cap,
        }


def exact_sampler_stats(
    g: Graph, activation_probability: Fraction, cap: int = SAMPLER_CAP,
    permutation_cap: int = PERMUTATION_CAP,
) -> ExactSamplerStats:
    """Exact sampler statistics by summing over every activated set and every
    priority ordering of it.

    Activated sets larger than ``permutation_cap`` are not enumerated: their
    per-vertex contribution uses 1/(1 + activated neighbours) and the joint
    neighbourhood statistics are reported as None.
    """
    if g.n > cap:
        raise OracleSizeError(f"{g.n} vertices exceeds the cap of {cap}")
    p = Fraction(activation_probability)
    if not 0 <= p <= 1:
        raise ValueError("activation probability outside [0, 1]")
    n = g.n
    tallies = _tallies(g, permutation_cap)
    p_in = [Fraction(0)] * n
    root = [[Fraction(0)] * 4 for _ in range(n)]
    skipped = 0
    for mask, t in enumerate(tallies):
        w = p**t.size * (1 - p) ** (n - t.size)
        if w == 0:
            continue
        if t.orderings == 0:
            skipped += 1
            for v in range(n):
                if mask >> v & 1:
                    d = sum(1 for u in g.adjacency[v] if mask >> u & 1)
                    p_in[v] += w / (d + 1)
            continue
        scale = w / t.orderings
        for v in range(n):
            if t.vertex_hits[v]:
                p_in[v] += scale * t.vertex_hits[v]
            for j in range(4):
                if t.root_hits[v][j]:
                    root[v][j] += scale * t.root_hits[v][j]
    joint = (lambda j: tuple(root[r][j] for r in range(n))) if skipped == 0 else (
        lambda j: (None,) * n
    )
    return ExactSamplerStats(
        p, tuple(p_in), joint(1), joint(2), joint(3), joint(0), skipped, permutation_cap
    )
