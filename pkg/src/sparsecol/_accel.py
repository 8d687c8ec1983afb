"""Numba switch.

Hot kernels are written once in a numba-compatible subset of Python.  When
numba is importable and ``SPARSECOL_NO_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the callers use the vectorised numpy
implementations in :mod:`sparsecol.kernels`.
"""
from __future__ import annotations

import os

_flag = os.environ.get("SPARSECOL_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by SPARSECOL_NO_NUMBA")
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # thread-safe layer that skips the TBB version probe
        numba.config.THREADING_LAYER = "omp"
    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range


def worker_count() -> int:
    """Worker cap from ``COLOUR_THREADS`` (default: all numba threads, or 1)."""
    raw = os.environ.get("COLOUR_THREADS", "").strip()
    limit = numba.config.NUMBA_NUM_THREADS if HAS_NUMBA else 1
    if not raw:
        return limit
    try:
        want = int(raw)
    except ValueError:
        raise ValueError(f"COLOUR_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(want, limit))


def configure_threads() -> int:
    n = worker_count()
    if HAS_NUMBA:
        numba.set_num_threads(n)
    return n
