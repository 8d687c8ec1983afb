"""Iterative random colouring ("nibble") for locally sparse graphs.

Each round gives every vertex a random colour from its list and a random
priority; a vertex keeps its colour unless a same-coloured neighbour has at
least its priority.  Uncoloured vertices lose the colours taken by their
coloured neighbours, lists are trimmed and then padded with fresh colours so
that Delta/list-size stays near ``gamma``, and the loop repeats until the
residual maximum degree is small.  The rest is coloured greedily.

Colourings are plain ``dict[int, int]`` maps from vertex to colour id.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from . import kernels
from .analysis import (
    QuasirandomSlack,
    as_fraction,
    max_codegree,
    quasirandom_check,
    rational_json,
    sigma_sparsity,
    smallest_last_order,
)
from .constructions import ListAssignment, colourwise_regularize
from .graph import Graph
from .sampler import Budget, bound_calculator, epsilon_col, epsilon_vu

log = logging.getLogger(__name__)

MODES = ("strict", "practical")


def mu_of(gamma: float) -> float:
    """Expected uncoloured fraction 1 - (1 - e^-gamma)/gamma."""
    return 1 - (1 - math.exp(-gamma)) / gamma


@dataclass(frozen=True)
class NibbleConfig:
    """Parameters of the colouring driver.

    ``strict`` uses the asymptotic slacks sqrt(D) ln(D)^2 (lists) and
    sqrt(D) ln(D)^5 (quasirandomness) and trims lists to the resulting k'.
    ``practical`` uses ``list_slack``/``quasi_slack``, keeps each residual
    list whole (up to the next list size) and reports the smallest one as k'.
    """

    gamma: float = 4.0
    iota: float = 0.1
    mode: str = "practical"
    seed: int = 0
    max_retries: int = 64
    quasi_slack: QuasirandomSlack = QuasirandomSlack("scaled", c=1.0, p=1.0)
    list_slack: QuasirandomSlack = QuasirandomSlack("scaled", c=1.0, p=0.0)
    check_quasirandom: bool = True
    fallback: str = "best"  # "best": keep plain greedy if it uses fewer colours; "bound": only above Delta+1
    max_rounds: int | None = None
    colourwise: bool = False

    def __post_init__(self):
        if not self.gamma > 2:
            raise ValueError("gamma must exceed 2")
        if not 0 < self.iota < 1:
            raise ValueError("iota must lie in (0, 1)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")
        if self.fallback not in ("best", "bound"):
            raise ValueError("fallback must be 'best' or 'bound'")
        if self.mode == "strict" and not 1 / self.gamma < 2 / 3 - self.iota / 3:
            # eps <= 1/3, so this makes 1/gamma < 1 - eps - iota/3 hold in every round
            raise ValueError("strict mode needs 1/gamma < 2/3 - iota/3")

    @property
    def mu(self) -> float:
        return mu_of(self.gamma)

    def list_threshold_slack(self, delta: int) -> float:
        if self.mode == "strict":
            return math.sqrt(delta) * math.log(delta) ** 2 if delta > 1 else 0.0
        return self.list_slack(delta)

    def quasi_threshold(self, delta: int) -> float:
        if self.mode == "strict":
            return QuasirandomSlack()(delta)
        return self.quasi_slack(delta)

    def round_cap(self) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        return math.ceil(math.log(self.iota / 3) / math.log(self.mu)) + 20

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "iota": self.iota,
            "mode": self.mode,
            "seed": self.seed,
            "max_retries": self.max_retries,
            "quasi_slack": self.quasi_slack.to_json(),
            "list_slack": self.list_slack.to_json(),
            "check_quasirandom": self.check_quasirandom,
            "fallback": self.fallback,
            "max_rounds": self.round_cap(),
            "colourwise": self.colourwise,
        }


# -- single round --------------------------------------------------------------


@dataclass
class NibbleReport:
    round: int
    k: int
    k_prime: int
    k_prime_real: float
    k_doubleprime: int
    delta_before: int
    delta_after: int
    sigma_before: Fraction
    sigma_after: Fraction | None
    epsilon: float
    mu: float
    gamma_prime: float
    bad_event_counts: dict
    retries_used: int
    fallback_triggered: bool
    coloured: int
    residual: int
    min_residual_list: int | None
    quasi_max_deviation: float | None
    quasi_threshold: float
    padding_ok: bool | None = None
    padded_with: int = 0
    sigma_drop_ok: bool | None = None

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["sigma_before"] = rational_json(self.sigma_before)
        d["sigma_after"] = None if self.sigma_after is None else rational_json(self.sigma_after)
        return d


@dataclass
class NibbleOutcome:
    colouring: dict[int, int]
    residual_vertices: list[int]
    residual_lists: dict[int, frozenset[int]]
    report: NibbleReport
    initial_colour: dict[int, int]
    priority: dict[int, int]
    uncoloured: frozenset[int]

    def residual_graph(self, g: Graph) -> tuple[Graph, list[int]]:
        return g.induced_subgraph(self.residual_vertices)


def _attempt(g: Graph, lists: Mapping[int, frozenset[int]] | ListAssignment, key: int):
    """Random colours and priorities for every vertex; returns ``(c0, pri, U)``."""
    n = g.n
    keys = np.array([key], dtype=np.uint64)
    with np.errstate(over="ignore"):
        cdraw = kernels.draws_np(keys, n, kernels.COLOUR)[0]
        pri = kernels.draws_np(keys, n, kernels.PRIORITY)
    c0 = np.empty(n, dtype=np.int64)
    for v in range(n):
        opts = sorted(lists[v])
        c0[v] = opts[int(cdraw[v]) % len(opts)]
    indptr, indices = g.csr
    active = np.ones((1, n), dtype=bool)
    lost = kernels.trumped_np(indptr, indices, active, pri, colour=c0[None, :])[0]
    return c0, pri[0], lost


def _round_key(seed: int, round_index: int, attempt: int) -> int:
    return kernels.trial_key(kernels.trial_key(seed, round_index), attempt)


def one_nibble(
    g: Graph,
    lists: ListAssignment,
    cfg: NibbleConfig,
    round_index: int = 0,
    sigma: Fraction | float | None = None,
    epsilon_fn: Callable[[float], float] = epsilon_col,
    sparsity_measure: Callable[[Graph], Fraction] | None = None,
) -> NibbleOutcome:
    """One random colouring round with bad-event detection and whole-round resampling.

    ``sigma`` overrides the measured sparsity in the k' threshold;
    ``epsilon_fn`` maps sparsity to the savings fraction.
    """
    delta = g.max_degree
    # an edgeless graph keeps one colour per vertex and has no conflicts
    k_min = max(1, math.ceil(delta / cfg.gamma))
    sizes = set(lists.sizes())
    if len(sizes) != 1 or min(sizes) < k_min:
        raise ValueError(f"lists must share one size >= {k_min}, got sizes {sorted(sizes)}")
    k = sizes.pop()
    if sparsity_measure is None:
        sparsity_measure = lambda h: sigma_sparsity(h).sigma
    sigma_before = sparsity_measure(g)
    s_used = as_fraction(sigma) if sigma is not None else sigma_before
    eps = epsilon_fn(float(s_used))
    mu = cfg.mu
    gamma_prime = delta / k
    mu_prime = mu_of(gamma_prime) if gamma_prime > 0 else 0.0
    round_iota = cfg.iota / 3
    k_prime_real = (
        k - (1 - mu) * (1 - eps + round_iota / 2) * delta - cfg.list_threshold_slack(delta)
    )
    q_thr = cfg.quasi_threshold(delta)

    sample_graph, sample_lists = g, lists
    if cfg.colourwise:
        sample_graph, sample_lists = colourwise_regularize(g, lists, delta)

    best = None
    attempts = 0
    for attempt in range(cfg.max_retries):
        attempts = attempt + 1
        c0, pri, lost = _attempt(sample_graph, sample_lists, _round_key(cfg.seed, round_index, attempt))
        c0, pri, lost = c0[: g.n], pri[: g.n], lost[: g.n]
        uncol = np.flatnonzero(lost)
        uset = set(int(v) for v in uncol)
        colouring = {v: int(c0[v]) for v in range(g.n) if v not in uset}
        residual_lists = {}
        for v in uset:
            taken = {colouring[u] for u in g.adjacency[v] if u in colouring}
            residual_lists[v] = lists[v] - taken
        b_v = sum(1 for v in uset if len(residual_lists[v]) < k_prime_real)
        quasi = None
        b_uv = 0
        if cfg.check_quasirandom and uset:
            quasi = quasirandom_check(g, uset, mu_prime, q_thr, delta=delta)
            b_uv = quasi.violations
        score = b_v + b_uv
        if best is None or score < best[0]:
            best = (score, attempt, c0, pri, uset, colouring, residual_lists, b_v, b_uv, quasi)
        if score == 0:
            break
    score, attempt, c0, pri, uset, colouring, residual_lists, b_v, b_uv, quasi = best
    if score:
        log.info("round %d: %d bad events after %d attempts", round_index, score, attempts)
    residual_vertices = sorted(uset)
    if residual_vertices:
        rg, _ = g.induced_subgraph(residual_vertices)
        delta_after = rg.max_degree
    else:
        rg, delta_after = None, 0
    min_list = min((len(l) for l in residual_lists.values()), default=None)
    if cfg.mode == "strict":
        k_prime = max(0, math.floor(k_prime_real))
    else:
        k_prime = min_list if min_list is not None else k
    report = NibbleReport(
        round=round_index,
        k=k,
        k_prime=k_prime,
        k_prime_real=k_prime_real,
        k_doubleprime=math.ceil(delta_after / cfg.gamma),
        delta_before=delta,
        delta_after=delta_after,
        sigma_before=sigma_before,
        sigma_after=sparsity_measure(rg) if rg is not None and rg.n else None,
        epsilon=eps,
        mu=mu,
        gamma_prime=gamma_prime,
        bad_event_counts={"B_v": b_v, "B_uv": b_uv},
        retries_used=attempt,
        fallback_triggered=score > 0,
        coloured=len(colouring),
        residual=len(residual_vertices),
        min_residual_list=min_list,
        quasi_max_deviation=None if quasi is None else quasi.max_deviation,
        quasi_threshold=q_thr,
    )
    return NibbleOutcome(
        colouring, residual_vertices, residual_lists, report,
        {v: int(c0[v]) for v in range(g.n)}, {v: int(pri[v]) for v in range(g.n)},
        frozenset(uset),
    )


# -- greedy completion and validation ------------------------------------------------


def greedy_complete(
    g: Graph, partial: Mapping[int, int] | None = None, palette_hint: Iterable[int] = ()
) -> dict[int, int]:
    """Extend a proper partial colouring to all of ``g``.

    Uncoloured vertices go in smallest-last order of the subgraph they induce;
    each takes the least hint colour free in its neighbourhood, else the least
    free non-hint colour.
    """
    colour = dict(partial or {})
    hint = sorted(set(palette_hint))
    todo = [v for v in range(g.n) if v not in colour]
    for v in smallest_last_order(g, todo):
        used = {colour[u] for u in g.adjacency[v] if u in colour}
        pick = next((c for c in hint if c not in used), None)
        if pick is None:
            hs = set(hint)
            pick = next(c for c in range(len(used) + len(hs) + 1) if c not in used and c not in hs)
        colour[v] = pick
    return colour


@dataclass(frozen=True)
class ColouringValidation:
    passed: bool
    conflicts: tuple[tuple[int, int], ...]
    colour_count: int
    max_colour: int | None
    uncoloured: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "conflicts": [list(e) for e in self.conflicts],
            "colour_count": self.colour_count,
            "max_colour": self.max_colour,
            "uncoloured": self.uncoloured,
        }


def validate_colouring(g: Graph, c: Mapping[int, int]) -> ColouringValidation:
    """Every monochromatic edge inside the domain of ``c``; passes iff there are none."""
    conflicts = tuple((u, v) for u, v in g.edges() if u in c and v in c and c[u] == c[v])
    colours = set(c.values())
    return ColouringValidation(
        not conflicts, conflicts, len(colours), max(colours) if colours else None,
        sum(1 for v in range(g.n) if v not in c),
    )


def compact(c: Mapping[int, int]) -> dict[int, int]:
    """Relabel colours to 0..k-1 preserving their order."""
    rank = {col: i for i, col in enumerate(sorted(set(c.values())))}
    return {v: rank[col] for v, col in sorted(c.items())}


# -- driver ----------------------------------------------------------------------------


@dataclass
class ColouringResult:
    colouring: dict[int, int]
    colour_count: int
    budget: Budget
    reports: list[NibbleReport]
    nibble_colour_count: int
    greedy_colour_count: int
    fallback_used: bool
    fallback_reason: str | None
    sigma: Fraction
    epsilon: float
    termination: str
    validation: ColouringValidation = field(default=None)

    def to_json(self) -> dict:
        return {
            "colour_count": self.colour_count,
            "budget": self.budget.to_json(),
            "nibble_colour_count": self.nibble_colour_count,
            "greedy_colour_count": self.greedy_colour_count,
            "fallback_used": self.fallback_used,
            "fallback_reason": self.fallback_reason,
            "sigma": rational_json(self.sigma),
            "epsilon": self.epsilon,
            "termination": self.termination,
            "rounds": [r.to_json() for r in self.reports],
            "validation": self.validation.to_json(),
            "colouring": {str(v): c for v, c in sorted(self.colouring.items())},
        }


def _trim_and_pad(
    residual_lists: dict[int, frozenset[int]], k_prime: int, k2: int, next_fresh: int
) -> tuple[dict[int, frozenset[int]], int, int]:
    """Keep the ``k_prime`` smallest colours of each list (at most ``k2``), then
    pad every list to exactly ``k2`` with fresh colours from ``next_fresh``."""
    keep = min(k_prime, k2)
    out = {}
    deficit = 0
    for v, l in residual_lists.items():
        kept = sorted(l)[:keep]
        need = k2 - len(kept)
        deficit = max(deficit, need)
        out[v] = frozenset(kept) | frozenset(range(next_fresh, next_fresh + need))
    return out, next_fresh + deficit, deficit


def _run(
    g: Graph,
    cfg: NibbleConfig,
    sigma_override,
    epsilon_fn: Callable[[float], float],
    sparsity_measure: Callable[[Graph], Fraction],
    budget: Budget,
    sigma_g: Fraction,
) -> ColouringResult:
    delta = g.max_degree
    reports: list[NibbleReport] = []
    colouring: dict[int, int] = {}
    stop_at = math.floor(cfg.iota * delta / 3)
    termination = "empty"
    current = list(range(g.n))
    if delta >= 1:
        k = math.ceil(delta / cfg.gamma)
        lists = {v: frozenset(range(k)) for v in current}
        next_fresh = k
    else:
        lists, next_fresh = {}, 0
    cap = cfg.round_cap()
    rnd = 0
    while current:
        sub, ids = g.induced_subgraph(current)
        d_sub = sub.max_degree
        if d_sub <= cfg.gamma:
            termination = "degenerate" if d_sub >= 1 else "edgeless"
            break
        if rnd >= cap:
            termination = "round-cap"
            break
        la = ListAssignment(tuple(lists[v] for v in ids), next_fresh)
        out = one_nibble(sub, la, cfg, rnd, sigma_override, epsilon_fn, sparsity_measure)
        rep = out.report
        for lv, col in out.colouring.items():
            colouring[ids[lv]] = col
        current = [ids[lv] for lv in out.residual_vertices]
        k2 = rep.k_doubleprime
        if cfg.mode == "strict":
            # an edgeless residual needs no lists beyond greedy completion
            rep.padding_ok = rep.k_prime < k2 or not current or rep.delta_after == 0
            chain = 1 / cfg.gamma < 1 - rep.epsilon - cfg.iota / 3
            assert chain, "padding chain 1/gamma < 1 - eps - iota/3 violated"
            if not rep.padding_ok:
                log.warning("round %d: k' = %d not below k'' = %d", rnd, rep.k_prime, k2)
        else:
            rep.padding_ok = rep.k_prime < k2 if current else None
        if rep.sigma_after is not None:
            rep.sigma_drop_ok = rep.sigma_after >= rep.sigma_before - as_fraction(cfg.iota / 3)
        new_lists = {ids[lv]: l for lv, l in out.residual_lists.items()}
        if current and k2 >= 1:
            # practical mode keeps every surviving colour up to the new list size
            keep = rep.k_prime if cfg.mode == "strict" else k2
            lists, next_fresh, rep.padded_with = _trim_and_pad(new_lists, keep, k2, next_fresh)
        reports.append(rep)
        rnd += 1
        if rep.delta_after < stop_at:
            termination = "threshold"
            break
    assert rnd <= cap
    nibble = greedy_complete(g, colouring, range(next_fresh))
    nibble_count = len(set(nibble.values()))
    plain = greedy_complete(g, {}, ())
    plain_count = len(set(plain.values()))
    reason = None
    if nibble_count > delta + 1:
        reason = "exceeds Delta+1"
    elif cfg.fallback == "best" and plain_count < nibble_count:
        reason = "greedy uses fewer colours"
    final = compact(plain if reason else nibble)
    val = validate_colouring(g, final)
    return ColouringResult(
        final, val.colour_count, budget, reports, nibble_count, plain_count,
        reason is not None, reason, sigma_g, epsilon_fn(float(sigma_g)), termination, val,
    )


def iterative_colour(g: Graph, cfg: NibbleConfig, sigma=None) -> ColouringResult:
    """Colour ``g`` properly with the nibble driver; never more than Delta+1 colours.

    ``sigma`` (default: the measured local sparsity) enters the per-round
    threshold and the reported budget (1 - eps(sigma) + iota) Delta.
    """
    sigma_g = sigma_sparsity(g).sigma if sigma is None else as_fraction(sigma)
    budget = bound_calculator("sparse", delta=g.max_degree, sigma=float(sigma_g), iota=cfg.iota)
    return _run(g, cfg, sigma, epsilon_col, lambda h: sigma_sparsity(h).sigma, budget, sigma_g)


def iterative_colour_codegree(g: Graph, cfg: NibbleConfig) -> ColouringResult:
    """As :func:`iterative_colour`, with thresholds and budget driven by the
    codegree sparsity sigma_hat and epsilon_vu."""
    sh = max_codegree(g).sigma_hat
    budget = bound_calculator("vu", delta=g.max_degree, sigma_hat=float(sh), iota=cfg.iota)
    return _run(g, cfg, None, epsilon_vu, lambda h: max_codegree(h).sigma_hat, budget, sh)
