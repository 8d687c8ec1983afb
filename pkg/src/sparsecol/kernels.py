"""Hot loops of the Monte Carlo sampler, in numba and in plain numpy.

Randomness is counter based: every draw is ``splitmix64`` of a trial key
plus a per-(vertex, purpose) counter, so a trial's outcome depends only on
``(seed, trial, vertex)`` and never on thread scheduling.  Both
implementations consume exactly the same draws and return identical counts.
"""
from __future__ import annotations

import numpy as np

from ._accel import HAS_NUMBA, njit, prange

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TRIAL_MIX = 0xD1B54A32D192ED03

# draw purposes; counter for (vertex v, purpose s) is 4 * v + s
ACTIVATE = 0
PRIORITY = 1
COLOUR = 2

BLOCK = 4096  # trials per work unit; fixed so results do not depend on worker count
ROOT_FIELDS = ("nonempty", "size", "size_sq", "pairs", "pairs_sq", "triples", "triples_sq", "ie_violations")


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def trial_key(seed: int, trial: int) -> int:
    """Key of substream ``trial`` under master ``seed``."""
    return splitmix64(splitmix64(seed & MASK64) ^ ((trial * _TRIAL_MIX) & MASK64))


def draw(key: int, vertex: int, purpose: int) -> int:
    return splitmix64((key + (4 * vertex + purpose) * GOLDEN) & MASK64)


def activation_threshold(p: float) -> int:
    """53-bit threshold: a vertex activates when ``draw >> 11 < threshold``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"activation probability {p} outside [0, 1]")
    return int(round(p * (1 << 53)))


# -- numpy implementation ----------------------------------------------------


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    z = x + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def trial_keys_np(seed: int, trials: np.ndarray) -> np.ndarray:
    base = np.uint64(splitmix64(seed & MASK64))
    with np.errstate(over="ignore"):
        return _splitmix64_np(base ^ (trials.astype(np.uint64) * np.uint64(_TRIAL_MIX)))


def draws_np(keys: np.ndarray, n: int, purpose: int) -> np.ndarray:
    """``(len(keys), n)`` array of draws for every vertex."""
    ctr = (np.arange(n, dtype=np.uint64) * np.uint64(4) + np.uint64(purpose)) * np.uint64(GOLDEN)
    return _splitmix64_np(keys[:, None] + ctr[None, :])


def trumped_np(indptr, indices, active, key, colour=None):
    """Boolean ``(B, n)``: vertex is active and some active neighbour beats it.

    ``u`` beats ``v`` when ``key[u] > key[v]``, or the keys tie and ``u < v``.
    With ``colour`` given, only neighbours of the same colour compete.
    """
    n = len(indptr) - 1
    owner = np.repeat(np.arange(n), np.diff(indptr))
    src = indices
    beats = (key[:, src] > key[:, owner]) | ((key[:, src] == key[:, owner]) & (src < owner)[None, :])
    hit = active[:, src] & active[:, owner] & beats
    if colour is not None:
        hit &= colour[:, src] == colour[:, owner]
    out = np.zeros(active.shape, dtype=bool)
    nonempty = np.flatnonzero(np.diff(indptr) > 0)
    if len(nonempty):
        red = np.logical_or.reduceat(hit, indptr[nonempty], axis=1)
        out[:, nonempty] = red
    return out


def _independent_sets_np(indptr, indices, threshold, seed, t0, t1):
    n = len(indptr) - 1
    keys = trial_keys_np(seed, np.arange(t0, t1, dtype=np.uint64))
    with np.errstate(over="ignore"):
        act = (draws_np(keys, n, ACTIVATE) >> np.uint64(11)) < np.uint64(threshold)
        pri = draws_np(keys, n, PRIORITY)
    return act & ~trumped_np(indptr, indices, act, pri)


def mc_counts_np(indptr, indices, roots, threshold, seed, trials):
    n = len(indptr) - 1
    vcount = np.zeros(n, dtype=np.int64)
    rstats = np.zeros((len(roots), len(ROOT_FIELDS)), dtype=np.int64)
    for t0 in range(0, trials, BLOCK):
        t1 = min(trials, t0 + BLOCK)
        ins = _independent_sets_np(indptr, indices, threshold, seed, t0, t1)
        vcount += ins.sum(axis=0)
        for j, r in enumerate(roots):
            s = ins[:, indices[indptr[r] : indptr[r + 1]]].sum(axis=1).astype(np.int64)
            ne = (s > 0).astype(np.int64)
            p = s * (s - 1) // 2
            t = s * (s - 1) * (s - 2) // 6
            rstats[j] += (
                ne.sum(), s.sum(), (s * s).sum(), p.sum(), (p * p).sum(),
                t.sum(), (t * t).sum(), (ne > s - p + t).sum(),
            )
    return vcount, rstats


# -- numba implementation ------------------------------------------------------


@njit(cache=True, inline="always")
def _mix(x):
    z = x + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _mc_block_nb(indptr, indices, roots, threshold, seed_mix, t0, t1, vcount, rstats):
    n = indptr.shape[0] - 1
    act = np.zeros(n, dtype=np.bool_)
    pri = np.zeros(n, dtype=np.uint64)
    ins = np.zeros(n, dtype=np.bool_)
    golden = np.uint64(GOLDEN)
    four = np.uint64(4)
    for t in range(t0, t1):
        key = _mix(seed_mix ^ (np.uint64(t) * np.uint64(_TRIAL_MIX)))
        for v in range(n):
            c = np.uint64(v) * four
            a = (_mix(key + (c + np.uint64(ACTIVATE)) * golden) >> np.uint64(11)) < threshold
            act[v] = a
            if a:
                pri[v] = _mix(key + (c + np.uint64(PRIORITY)) * golden)
        for v in range(n):
            ok = act[v]
            if ok:
                pv = pri[v]
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if act[u] and (pri[u] > pv or (pri[u] == pv and u < v)):
                        ok = False
                        break
            ins[v] = ok
            if ok:
                vcount[v] += 1
        for j in range(roots.shape[0]):
            r = roots[j]
            s = 0
            for e in range(indptr[r], indptr[r + 1]):
                if ins[indices[e]]:
                    s += 1
            ne = 1 if s > 0 else 0
            p = s * (s - 1) // 2
            tr = s * (s - 1) * (s - 2) // 6
            rstats[j, 0] += ne
            rstats[j, 1] += s
            rstats[j, 2] += s * s
            rstats[j, 3] += p
            rstats[j, 4] += p * p
            rstats[j, 5] += tr
            rstats[j, 6] += tr * tr
            if ne > s - p + tr:
                rstats[j, 7] += 1


@njit(cache=True, nogil=True, parallel=True)
def _mc_counts_nb(indptr, indices, roots, threshold, seed_mix, trials, block):
    n = indptr.shape[0] - 1
    nblocks = (trials + block - 1) // block
    vc = np.zeros((nblocks, n), dtype=np.int64)
    rs = np.zeros((nblocks, roots.shape[0], 8), dtype=np.int64)
    for b in prange(nblocks):
        t0 = b * block
        t1 = min(trials, t0 + block)
        _mc_block_nb(indptr, indices, roots, threshold, seed_mix, t0, t1, vc[b], rs[b])
    return vc.sum(axis=0), rs.sum(axis=0)


def mc_counts(indptr, indices, roots, threshold: int, seed: int, trials: int, use_numba=None):
    """Integer tallies over ``trials`` sampler runs.

    Returns ``(vertex_counts, root_stats)``: how often each vertex lands in the
    independent set, and per root the sums named in :data:`ROOT_FIELDS`.
    """
    roots = np.asarray(roots, dtype=np.int64)
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba and not HAS_NUMBA:
        raise RuntimeError("numba requested but unavailable")
    if use_numba:
        return _mc_counts_nb(
            indptr, indices, roots, np.uint64(threshold),
            np.uint64(splitmix64(seed & MASK64)), trials, BLOCK,
        )
    return mc_counts_np(indptr, indices, roots, threshold, seed, trials)
