"""Time the Monte Carlo sampler kernel on the numba and numpy paths.

    python3 benchmarks/bench_kernels.py [--trials N] [--repeat R]

Both paths consume the same counter-based draws, so the script also checks
that their integer tallies agree before reporting timings.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from sparsecol import kernels
from sparsecol.constructions import blow_up, cycle_graph, petersen_graph, random_regular_graph
from sparsecol.sampler import SamplerConfig


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cases = {
        "petersen": petersen_graph(),
        "rr8_n100": random_regular_graph(8, 100, seed=1),
        "c5_blowup_t10": blow_up(cycle_graph(5), 10),
    }
    print(f"numba available: {kernels.HAS_NUMBA}")
    print(f"{'graph':<16}{'n':>6}{'numpy s':>10}{'numba s':>10}{'speedup':>9}  match")
    for name, g in cases.items():
        indptr, indices = g.csr
        roots = np.arange(min(g.n, 20))
        thr = kernels.activation_threshold(float(SamplerConfig(2.0).activation_probability(g)))

        def run(nb: bool):
            return kernels.mc_counts(indptr, indices, roots, thr, 7, args.trials, use_numba=nb)

        t_np = _time(lambda: run(False), args.repeat)
        if kernels.HAS_NUMBA:
            run(True)  # compile outside the timed region
            t_nb = _time(lambda: run(True), args.repeat)
            a, b = run(False), run(True)
            match = np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
            print(f"{name:<16}{g.n:>6}{t_np:>10.3f}{t_nb:>10.3f}{t_np / t_nb:>9.1f}  {match}")
        else:
            print(f"{name:<16}{g.n:>6}{t_np:>10.3f}{'-':>10}{'-':>9}  -")


if __name__ == "__main__":
    main()
