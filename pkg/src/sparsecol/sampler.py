"""Random-priority independent sets: sampling, exact membership formulas,
Monte Carlo statistics for neighbourhood intersections, and the closed-form
colour budgets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .analysis import as_fraction, independent_pairs_and_triples
from .graph import Graph


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    """Activation intensity ``gamma``: each vertex activates with probability gamma/Delta.

    ``delta_override`` replaces Delta(g) in that ratio.  An edgeless graph
    with no override uses Delta = 1.
    """

    gamma: float | Fraction
    delta_override: int | None = None
    seed: int = 0

    def delta_for(self, g: Graph) -> int:
        if self.delta_override is not None:
            return int(self.delta_override)
        return max(g.max_degree, 1)

    def activation_probability(self, g: Graph) -> Fraction:
        """Exact gamma/Delta; raises ConfigError when it is not a probability."""
        gamma = as_fraction(self.gamma)
        delta = self.delta_for(g)
        if gamma < 0:
            raise ConfigError("gamma must be non-negative")
        if delta <= 0:
            raise ConfigError("Delta must be positive")
        a = gamma / delta
        if a > 1:
            raise ConfigError(f"gamma/Delta = {a} exceeds 1")
        return a

    def to_json(self) -> dict:
        return {"gamma": float(self.gamma), "delta_override": self.delta_override, "seed": self.seed}


@dataclass(frozen=True)
class SampleOutcome:
    activated: frozenset[int]
    priorities: dict[int, int]  # 64-bit integer priority; divide by 2**64 for [0, 1)
    independent_set: frozenset[int]

    def priority(self, v: int) -> float:
        return self.priorities[v] / 2.0**64


def beats(u: int, pu: int, v: int, pv: int) -> bool:
    """``u`` trumps ``v``: higher priority, or equal priority and smaller id."""
    return pu > pv or (pu == pv and u < v)


def sample_independent_set(g: Graph, cfg: SamplerConfig, trial: int = 0) -> SampleOutcome:
    """One run of the sampler, on substream ``trial`` of ``cfg.seed``.

    Uses the same draws as trial ``trial`` of :func:`monte_carlo_stats`.
    """
    p = cfg.activation_probability(g)
    thr = kernels.activation_threshold(float(p))
    key = kernels.trial_key(cfg.seed, trial)
    active = [v for v in range(g.n) if kernels.draw(key, v, kernels.ACTIVATE) >> 11 < thr]
    pri = {v: kernels.draw(key, v, kernels.PRIORITY) for v in active}
    aset = frozenset(active)
    ind = frozenset(
        v for v in active
        if not any(u in aset and beats(u, pri[u], v, pri[v]) for u in g.adjacency[v])
    )
    return SampleOutcome(aset, pri, ind)


# -- exact membership ----------------------------------------------------------


def membership_probability_exact(g: Graph, v: int, cfg: SamplerConfig) -> Fraction:
    """P[v in I] = a * sum_j C(d,j) a^j (1-a)^(d-j) / (j+1), with a = gamma/Delta, d = d(v).

    Given pi(v), each neighbour trumps v independently, so the sum is exact on
    any graph: v survives iff it is the top of its j activated neighbours.
    """
    a = cfg.activation_probability(g)
    d = g.degree(v)
    return a * sum(
        Fraction(math.comb(d, j)) * a**j * (1 - a) ** (d - j) / (j + 1) for j in range(d + 1)
    )


def membership_probability_regular(delta: int, gamma) -> Fraction:
    """Closed form (1 - (1 - gamma/Delta)^(Delta+1)) / (Delta+1) for Delta-regular graphs."""
    a = as_fraction(gamma) / delta
    return (1 - (1 - a) ** (delta + 1)) / (delta + 1)


def membership_probability_integral(delta: int, gamma: float) -> float:
    """(1/Delta) * integral_0^gamma (1 - x/Delta)^Delta dx, by quadrature."""
    from scipy.integrate import quad

    val, _ = quad(lambda x: (1 - x / delta) ** delta, 0.0, float(gamma))
    return val / delta


# -- Monte Carlo -----------------------------------------------------------------


@dataclass(frozen=True)
class RootStats:
    root: int
    p_in: float
    e_ir: float
    p_nonempty: float
    e_pairs: float
    e_triples: float
    ratio: float
    stderr_p_in: float
    stderr_e_ir: float
    stderr_p_nonempty: float
    stderr_e_pairs: float
    stderr_e_triples: float
    stderr_ratio: float
    ie_violations: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SampleStats:
    trials: int
    config: SamplerConfig
    activation_probability: Fraction
    vertex_counts: tuple[int, ...]
    roots: tuple[RootStats, ...]
    backend: str = field(compare=False, default="numba")

    def p_in(self, v: int) -> float:
        return self.vertex_counts[v] / self.trials

    def stderr_p_in(self, v: int) -> float:
        p = self.p_in(v)
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    @property
    def ratio_estimate(self) -> float:
        """Pooled P[I_r nonempty] / E|I_r| over all roots."""
        num = sum(r.p_nonempty for r in self.roots)
        den = sum(r.e_ir for r in self.roots)
        return num / den if den else float("nan")

    @property
    def ie_violations(self) -> int:
        return sum(r.ie_violations for r in self.roots)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "config": self.config.to_json(),
            "activation_probability": float(self.activation_probability),
            "ratio_estimate": self.ratio_estimate,
            "ie_violations": self.ie_violations,
            "vertex_counts": list(self.vertex_counts),
            "roots": [r.to_json() for r in self.roots],
        }


def _mean_se(total: int, total_sq: int, n: int) -> tuple[float, float]:
    m = total / n
    var = max(total_sq / n - m * m, 0.0)
    return m, math.sqrt(var / n)


def _root_stats(r: int, vcount: int, row: Sequence[int], n: int) -> RootStats:
    ne, s, s2, p, p2, t, t2, viol = (int(x) for x in row)
    p_in = vcount / n
    pn, se_pn = _mean_se(ne, ne, n)
    es, se_s = _mean_se(s, s2, n)
    ep, se_p = _mean_se(p, p2, n)
    et, se_t = _mean_se(t, t2, n)
    if es > 0:
        ratio = pn / es
        # delta method; 1[nonempty] * |I_r| = |I_r|
        var_ne = pn - pn * pn
        var_s = s2 / n - es * es
        cov = es - pn * es
        v = (var_ne - 2 * ratio * cov + ratio * ratio * var_s) / (n * es * es)
        se_ratio = math.sqrt(max(v, 0.0))
    else:
        ratio, se_ratio = float("nan"), float("nan")
    return RootStats(
        r, p_in, es, pn, ep, et, ratio,
        math.sqrt(max(p_in * (1 - p_in), 0.0) / n), se_s, se_pn, se_p, se_t, se_ratio, viol,
    )


def monte_carlo_stats(
    g: Graph,
    roots: Iterable[int] | None,
    cfg: SamplerConfig,
    trials: int,
    use_numba: bool | None = None,
) -> SampleStats:
    """Estimates of P[r in I], E|I_r|, P[I_r nonempty], E[P_r], E[T_r] per root.

    ``roots=None`` means every vertex.  Tallies are integer sums over trial
    substreams, so the result is bit-identical for any worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = cfg.activation_probability(g)
    roots = list(range(g.n)) if roots is None else [int(r) for r in roots]
    for r in roots:
        if not 0 <= r < g.n:
            raise ValueError(f"root {r} out of range")
    indptr, indices = g.csr
    if use_numba is None:
        use_numba = kernels.HAS_NUMBA
    vcount, rstats = kernels.mc_counts(
        indptr, indices, roots, kernels.activation_threshold(float(p)), cfg.seed, trials,
        use_numba=use_numba,
    )
    per_root = tuple(_root_stats(r, int(vcount[r]), rstats[j], trials) for j, r in enumerate(roots))
    return SampleStats(
        trials, cfg, p, tuple(int(c) for c in vcount), per_root,
        backend="numba" if use_numba else "numpy",
    )


# -- asymptotic predictions and closed forms -----------------------------------


def expected_pairs_formula(g: Graph, r: int) -> float:
    """Leading-order prediction sigma_r * mean over independent pairs of 1/(2 - l_uv).

    Asymptotic in Delta and gamma; not an exact expectation.
    """
    if g.max_degree < 2:
        raise ValueError("needs maximum degree >= 2")
    info = independent_pairs_and_triples(g, r)
    if not info.pairs:
        return 0.0
    mean = sum(1 / (2 - ell) for _, _, ell in info.pairs) / len(info.pairs)
    return float(info.sigma_r * mean)


def _check_unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def epsilon_col(sigma) -> float:
    """Savings fraction sigma/2 - sigma^{3/2}/6."""
    s = _check_unit(sigma, "sigma")
    # factored form: one fewer rounding, and exactly 1/3 at s = 1
    return s * (3 - math.sqrt(s)) / 6


def epsilon_col_exact(sigma) -> Fraction | None:
    """Exact value when sigma is a rational square (None otherwise)."""
    s = as_fraction(sigma)
    rn, rd = math.isqrt(s.numerator), math.isqrt(s.denominator)
    if rn * rn != s.numerator or rd * rd != s.denominator:
        return None
    return s / 2 - s * Fraction(rn, rd) / 6


def _vu_first(s: float) -> float:
    return s / (1 + 2 * s) - (2 * s) ** 1.5


def epsilon_vu(sigma_hat) -> float:
    """max{s/(1+2s) - (2s)^{3/2}, epsilon_col(s)} for codegree sparsity s."""
    s = _check_unit(sigma_hat, "sigma_hat")
    return max(_vu_first(s), epsilon_col(s))


def epsilon_vu_crossover() -> float:
    """Largest s in (0, 1] below which the codegree term of epsilon_vu wins."""
    return brentq(lambda s: _vu_first(s) - epsilon_col(s), 1e-6, 0.2, xtol=1e-14)


# published constants
STRONG_COEFF = 1.772
REED_DELTA_COEFF = 0.881
REED_OMEGA_COEFF = 0.119


@dataclass(frozen=True)
class Budget:
    kind: str
    value: float
    colours: int
    params: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "colours": self.colours, "params": self.params}


def _ceil(x: float) -> int:
    # guard against representation noise such as 177.20000000000002
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else math.ceil(x)


def bound_calculator(kind: str, **params) -> Budget:
    """Closed-form colour budgets.

    ``sparse(delta, sigma, iota)``, ``strong(delta)``, ``reed(delta, omega)``,
    ``vu(delta, sigma_hat, iota)``.
    """
    need = {
        "sparse": ("delta", "sigma", "iota"),
        "strong": ("delta",),
        "reed": ("delta", "omega"),
        "vu": ("delta", "sigma_hat", "iota"),
    }
    if kind not in need:
        raise ValueError(f"unknown bound kind {kind!r}")
    missing = [k for k in need[kind] if params.get(k) is None]
    if missing:
        raise ValueError(f"{kind} bound needs {', '.join(missing)}")
    d = params["delta"]
    if kind == "sparse":
        value = (1 - epsilon_col(params["sigma"]) + params["iota"]) * d
    elif kind == "strong":
        value = STRONG_COEFF * d * d
    elif kind == "reed":
        value = REED_DELTA_COEFF * (d + 1) + REED_OMEGA_COEFF * params["omega"]
    else:
        value = (1 - epsilon_vu(params["sigma_hat"]) + params["iota"]) * d
    used = {k: params[k] for k in need[kind]}
    return Budget(kind, value, _ceil(value), used)
