"""Command-line entry point: ``sparsecol <command> ...``.

Every report is a JSON object holding the command, the fully resolved
arguments, the seed, the result and a ``timestamp``.  Apart from the
timestamp, the same arguments always give the same bytes.

Exit codes: 0 success, 1 validation failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import constructions as C
from ._accel import configure_threads, worker_count
from .analysis import (
    QuasirandomSlack,
    max_codegree,
    min_degree_core,
    rational_json,
    sigma_sparsity,
)
from .graph import FORMATS, Graph, GraphFormatError, read_graph, serialize_graph
from .nibble import NibbleConfig, iterative_colour, iterative_colour_codegree, validate_colouring
from .oracle import OracleSizeError, brute_chromatic, brute_strong_index, exact_sampler_stats
from .sampler import ConfigError, SamplerConfig, bound_calculator, epsilon_col, monte_carlo_stats
from .strong import StrongColouring, strong_edge_colour, validate_strong

GENERATORS = (
    "complete", "cycle", "path", "star", "petersen", "chvatal",
    "random-regular", "gnp", "sharpness", "blowup",
)


class UsageError(Exception):
    pass


# -- report plumbing ------------------------------------------------------


def _clean(x):
    if isinstance(x, float):
        return None if math.isnan(x) or math.isinf(x) else x
    if isinstance(x, Fraction):
        return rational_json(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "to_json"):
        return _clean(x.to_json())
    return x


def _spec(args: argparse.Namespace) -> dict:
    skip = {"func", "json", "csv"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(args: argparse.Namespace, result: dict) -> None:
    report = {
        "command": args.command,
        "spec": _spec(args),
        "seed": getattr(args, "seed", None),
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    text = render(report)
    if args.json and args.json != "-":
        Path(args.json).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace) -> Graph:
    if not args.graph:
        raise UsageError("--graph is required")
    return read_graph(args.graph, args.format)


def _gamma_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad gamma list {text!r}") from None
    if not vals:
        raise UsageError("empty gamma list")
    return vals


def _roots(text: str, g: Graph) -> list[int] | None:
    if text == "all":
        return None
    try:
        roots = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad root list {text!r}") from None
    bad = [r for r in roots if not 0 <= r < g.n]
    if bad:
        raise UsageError(f"roots out of range: {bad}")
    return roots


def _nibble_cfg(args: argparse.Namespace, gamma: float | None = None) -> NibbleConfig:
    try:
        return NibbleConfig(
            gamma=args.gamma if gamma is None else gamma,
            iota=args.iota,
            mode=args.mode,
            seed=args.seed,
            max_retries=args.max_retries,
            quasi_slack=QuasirandomSlack.parse(args.quasi_slack),
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- commands ------------------------------------------------------------------


def cmd_gen(args) -> int:
    fam, n = args.family, args.n
    if fam in ("complete", "cycle", "path", "star", "random-regular", "gnp", "blowup") and n is None:
        raise UsageError(f"gen {fam} needs --n")
    if fam == "complete":
        g = C.complete_graph(n)
    elif fam == "cycle":
        g = C.cycle_graph(n)
    elif fam == "path":
        g = C.path_graph(n)
    elif fam == "star":
        g = C.star_graph(n)
    elif fam == "petersen":
        g = C.petersen_graph()
    elif fam == "chvatal":
        g = C.chvatal_graph()
    elif fam == "random-regular":
        if args.delta is None:
            raise UsageError("gen random-regular needs --delta")
        g = C.random_regular_graph(args.delta, n, args.seed)
    elif fam == "gnp":
        if args.p is None:
            raise UsageError("gen gnp needs --p")
        g = C.gnp_graph(n, args.p, args.seed)
    elif fam == "sharpness":
        if args.delta is None or args.sigma is None:
            raise UsageError("gen sharpness needs --delta and --sigma")
        g = C.sharpness_construction(args.delta, Fraction(str(args.sigma)))
    else:
        # blow-up of the n-cycle
        g = C.blow_up(C.cycle_graph(n), args.copies)
    text = serialize_graph(g, args.format or "edge-list")
    if args.json and args.json != "-":
        Path(args.json).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    g = _load(args)
    sp = sigma_sparsity(g)
    cd = max_codegree(g)
    result = {
        "vertex_count": g.n,
        "edge_count": g.edge_count,
        "max_degree": g.max_degree,
        "regular": g.is_regular(),
        "sparsity": sp.to_json(),
        "codegree": cd.to_json(),
        "epsilon_col": epsilon_col(float(sp.sigma)),
    }
    if args.core is not None:
        core, peel = min_degree_core(g, args.core)
        result["core"] = {"d": args.core, "size": len(core), "peel_order": peel}
    _emit(args, result)
    return 0


def cmd_sample(args) -> int:
    g = _load(args)
    cfg = SamplerConfig(args.gamma, args.delta_override, args.seed)
    stats = monte_carlo_stats(g, _roots(args.roots, g), cfg, args.trials)
    _emit(args, stats.to_json())
    return 1 if stats.ie_violations else 0


def cmd_colour(args) -> int:
    g = _load(args)
    cfg = _nibble_cfg(args)
    if args.codegree:
        res = iterative_colour_codegree(g, cfg)
    else:
        res = iterative_colour(g, cfg, sigma=args.sigma)
    out = res.to_json()
    out["config"] = cfg.to_json()
    out["max_degree"] = g.max_degree
    _emit(args, out)
    return 0 if res.validation.passed else 1


def cmd_strong(args) -> int:
    g = _load(args)
    if g.edge_count == 0:
        raise UsageError("strong edge colouring needs at least one edge")
    cfg = _nibble_cfg(args)
    sc, report = strong_edge_colour(g, cfg, epsilon=args.epsilon)
    out = report.to_json()
    out["config"] = cfg.to_json()
    out["colouring"] = sc.to_json()
    _emit(args, out)
    return 0 if report.validation.passed else 1


def _read_colouring(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read colouring: {e}") from None
    # accept a bare map or a full report from ``colour``/``strong``
    if isinstance(data, dict) and "result" in data:
        data = data["result"]
    if isinstance(data, dict) and "colouring" in data:
        data = data["colouring"]
    if not isinstance(data, dict):
        raise UsageError("colouring must be a JSON object")
    return data


def cmd_verify(args) -> int:
    g = _load(args)
    raw = _read_colouring(args.colouring)
    try:
        if any("-" in k for k in raw):
            edges = {}
            for k, c in raw.items():
                u, v = sorted(int(x) for x in k.split("-"))
                edges[(u, v)] = int(c)
            val = validate_strong(g, StrongColouring(edges))
            kind = "strong-edge"
        else:
            val = validate_colouring(g, {int(k): int(c) for k, c in raw.items()})
            kind = "vertex"
    except ValueError as e:
        raise UsageError(f"bad colouring entry: {e}") from None
    _emit(args, {"kind": kind, "validation": val.to_json()})
    return 0 if val.passed else 1


def _parse_ratio(text: str) -> Fraction:
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad ratio {text!r}") from None
    if not 0 <= r <= 1:
        raise UsageError("gamma/Delta must lie in [0, 1]")
    return r


def cmd_oracle(args) -> int:
    g = _load(args)
    if args.what == "chromatic":
        result = {"chromatic_number": brute_chromatic(g)}
    elif args.what == "strong":
        result = {"strong_chromatic_index": brute_strong_index(g)}
    else:
        if args.gamma_over_delta is not None:
            p = _parse_ratio(args.gamma_over_delta)
        elif args.gamma is not None:
            p = SamplerConfig(Fraction(str(args.gamma))).activation_probability(g)
        else:
            raise UsageError("oracle sampler needs --gamma-over-delta or --gamma")
        result = exact_sampler_stats(g, p).to_json()
    _emit(args, result)
    return 0


def _sweep_sample(g: Graph, args, gamma: float) -> dict:
    cfg = SamplerConfig(gamma, args.delta_override, args.seed)
    st = monte_carlo_stats(g, _roots(args.roots, g), cfg, args.trials)
    mean_p = sum(r.p_in for r in st.roots) / len(st.roots) if st.roots else float("nan")
    return {
        "gamma": gamma,
        "activation_probability": float(st.activation_probability),
        "trials": st.trials,
        "roots": len(st.roots),
        "ratio": st.ratio_estimate,
        "mean_p_in": mean_p,
        "ie_violations": st.ie_violations,
    }


def _sweep_colour(g: Graph, args, gamma: float) -> dict:
    res = iterative_colour(g, _nibble_cfg(args, gamma))
    return {
        "gamma": gamma,
        "colour_count": res.colour_count,
        "nibble_colour_count": res.nibble_colour_count,
        "greedy_colour_count": res.greedy_colour_count,
        "budget": res.budget.colours,
        "rounds": len(res.reports),
        "proper": res.validation.passed,
    }


def cmd_sweep(args) -> int:
    g = _load(args)
    gammas = _gamma_list(args.gamma)
    point = _sweep_sample if args.what == "sample" else _sweep_colour
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        # each grid point owns its config and output slot; order follows the grid
        rows = list(pool.map(lambda gm: point(g, args, gm), gammas))
    if args.csv:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(_clean(rows))
        Path(args.csv).write_text(buf.getvalue())
    spec_args = argparse.Namespace(**{**vars(args), "gamma": gammas})
    spec_args.func = None
    _emit(spec_args, {"grid": rows})
    bad = any(r.get("ie_violations") or r.get("proper") is False for r in rows)
    return 1 if bad else 0


# -- parser ------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        p.add_argument("--graph", help="graph file (edge list or DIMACS .col)")
    p.add_argument("--format", choices=FORMATS, help="graph format (default: by extension)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", "-o", help="output path (default: stdout)")


def _nibble_args(p: argparse.ArgumentParser, gamma_default: float = 4.0) -> None:
    p.add_argument("--iota", type=float, default=0.1)
    p.add_argument("--mode", choices=("strict", "practical"), default="practical")
    p.add_argument("--max-retries", type=int, default=64)
    p.add_argument("--quasi-slack", default="scaled:1,1", help="paper | scaled:c,p | absolute:t")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sparsecol", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("family", choices=GENERATORS)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--copies", type=int, default=2)
    _common(p, graph=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="sparsity and codegree report")
    p.add_argument("--core", type=int, help="also peel to the min-degree-d core")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="Monte Carlo statistics of the sampler")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--roots", default="all")
    p.add_argument("--delta-override", type=int)
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("colour", help="colour with the iterative nibble driver")
    p.add_argument("--gamma", type=float, default=4.0)
    p.add_argument("--sigma", type=float, help="sparsity used for thresholds (default: measured)")
    p.add_argument("--codegree", action="store_true", help="use codegree sparsity instead")
    _nibble_args(p)
    _common(p)
    p.set_defaults(func=cmd_colour)

    p = sub.add_parser("strong", help="strong edge colouring")
    p.add_argument("--epsilon", type=float, default=0.228)
    p.add_argument("--gamma", type=float, default=4.0)
    _nibble_args(p)
    _common(p)
    p.set_defaults(func=cmd_strong)

    p = sub.add_parser("verify", help="check a vertex or strong edge colouring")
    p.add_argument("--colouring", required=True)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    p.add_argument("what", choices=("chromatic", "sampler", "strong"))
    p.add_argument("--gamma-over-delta", help="activation probability as p/q")
    p.add_argument("--gamma", type=float)
    _common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="run a grid over gamma")
    p.add_argument("what", choices=("sample", "colour"))
    p.add_argument("--gamma", required=True, help="comma-separated grid")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--roots", default="all")
    p.add_argument("--delta-override", type=int)
    p.add_argument("--csv", help="CSV output path")
    _nibble_args(p)
    _common(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_threads()
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, ConfigError, OracleSizeError, OSError) as e:
        print(f"sparsecol {args.command}: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"sparsecol {args.command}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
