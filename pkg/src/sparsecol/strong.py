"""Strong edge colouring through the squared line graph."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .analysis import min_degree_core, sigma_sparsity
from .constructions import square_line_graph
from .graph import Graph
from .nibble import NibbleConfig, compact, greedy_complete, iterative_colour
from .sampler import bound_calculator

PAPER_SIGMA = 0.277
DEFAULT_EPSILON = 0.228


def strong_coefficient(epsilon: float) -> float:
    """Coefficient of Delta^4 bounding neighbourhood edges in the high-degree core of L(G)^2."""
    if not 0 <= epsilon <= 0.3:
        raise ValueError("epsilon must lie in [0, 0.3]")
    e = epsilon
    return 31 / 6 - 128 / (3 * (10 - 3 * e)) + 4 * e - e * e


def theorem8_sparsity_constant(epsilon: float) -> tuple[float, float]:
    """``(coefficient, implied sigma)`` with coefficient <= (1 - sigma) * 2."""
    c = strong_coefficient(epsilon)
    return c, 1 - c / 2


def trivial_strong_bound(delta: int) -> int:
    return 2 * delta * delta - 2 * delta + 1


@dataclass
class StrongColouring:
    edge_colours: dict[tuple[int, int], int]
    classes: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.classes:
            for e, c in sorted(self.edge_colours.items()):
                self.classes.setdefault(c, []).append(e)

    @property
    def colour_count(self) -> int:
        return len(self.classes)

    def to_json(self) -> dict:
        return {f"{u}-{v}": c for (u, v), c in sorted(self.edge_colours.items())}


@dataclass(frozen=True)
class StrongValidation:
    passed: bool
    missing_edges: tuple[tuple[int, int], ...]
    violations: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    colour_count: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "missing_edges": [list(e) for e in self.missing_edges],
            "violations": [[list(a), list(b)] for a, b in self.violations],
            "colour_count": self.colour_count,
        }


def validate_strong(g: Graph, sc: StrongColouring) -> StrongValidation:
    """Check that every colour class is an induced matching covering all edges."""
    missing = tuple(e for e in g.edges() if e not in sc.edge_colours)
    bad = []
    for c, es in sc.classes.items():
        for i, (a, b) in enumerate(es):
            for c_, d in es[i + 1 :]:
                if {a, b} & {c_, d} or any(
                    g.has_edge(x, y) for x in (a, b) for y in (c_, d)
                ):
                    bad.append(((a, b), (c_, d)))
    return StrongValidation(not missing and not bad, missing, tuple(bad), sc.colour_count)


@dataclass
class StrongReport:
    delta: int
    colour_count: int
    trivial_bound: int
    budget_1772: float
    core_degree: int
    core_size: int
    peeled: int
    core_colours: int
    core_sigma: float | None
    sigma_used: float | None
    nibble_delta: int | None
    nominal_delta: int
    fallback_used: bool
    validation: StrongValidation

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["validation"] = self.validation.to_json()
        return d


def strong_edge_colour(
    g: Graph, cfg: NibbleConfig, epsilon: float = DEFAULT_EPSILON
) -> tuple[StrongColouring, StrongReport]:
    """Colour the high-degree core of L(g)^2 with the nibble, then the peeled
    edges greedily in reverse peel order on the shared palette."""
    if g.edge_count == 0:
        raise ValueError("graph has no edges")
    delta = g.max_degree
    h, edges = square_line_graph(g)
    d = math.ceil((2 - epsilon) * delta * delta)
    core, peel = min_degree_core(h, d)
    colour: dict[int, int] = {}
    core_sigma = sigma_used = None
    nibble_delta = None
    if core:
        sub, ids = h.induced_subgraph(core)
        core_sigma = float(sigma_sparsity(sub).sigma)
        sigma_used = min(PAPER_SIGMA, core_sigma)
        nibble_delta = sub.max_degree
        res = iterative_colour(sub, cfg, sigma=sigma_used)
        colour = {ids[v]: c for v, c in res.colouring.items()}
    core_colours = len(set(colour.values()))
    for v in reversed(peel):
        used = {colour[u] for u in h.adjacency[v] if u in colour}
        # fewer than d coloured neighbours by the peeling rule
        assert len(used) < d, "peeled vertex sees a full palette"
        colour[v] = next(c for c in range(d) if c not in used)
    fallback = False
    if len(set(colour.values())) > trivial_strong_bound(delta):
        colour = greedy_complete(h)
        fallback = True
    colour = compact(colour)
    sc = StrongColouring({edges[i]: c for i, c in colour.items()})
    val = validate_strong(g, sc)
    assert val.passed, "strong colouring failed validation"
    report = StrongReport(
        delta=delta,
        colour_count=sc.colour_count,
        trivial_bound=trivial_strong_bound(delta),
        budget_1772=bound_calculator("strong", delta=delta).value,
        core_degree=d,
        core_size=len(core),
        peeled=len(peel),
        core_colours=core_colours,
        core_sigma=core_sigma,
        sigma_used=sigma_used,
        nibble_delta=nibble_delta,
        nominal_delta=2 * delta * delta,
        fallback_used=fallback,
        validation=val,
    )
    return sc, report
