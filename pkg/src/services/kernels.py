"""
First-passage scan kernels.

Each start index is scanned forward until the cumulative log-return crosses
the level or the scan runs out of series or of tau_max; cost is O(N * E[tau]).
"""

import numpy as np
from numba import njit

# Absorbs float cancellation in s(t+dt) - s(t) for exact hits
LEVEL_EPS = 1e-12


@njit(cache=True)
def first_passage_one(s, t, rho, tau_max):
    """Waiting time from start t, or -1 when censored."""
    n = len(s)
    base = s[t]
    last = min(t + tau_max, n - 1)
    if rho > 0:
        target = rho - LEVEL_EPS
        for u in range(t + 1, last + 1):
            if s[u] - base >= target:
                return u - t
    else:
        target = rho + LEVEL_EPS
        for u in range(t + 1, last + 1):
            if s[u] - base <= target:
                return u - t
    return -1


@njit(cache=True)
def passage_counts(s, rho, tau_max, start_lo, start_hi):
    """
    Histogram of waiting times over starts in [start_lo, start_hi).

    Returns (counts indexed by tau with index 0 unused, censored count).
    """
    counts = np.zeros(tau_max + 1, dtype=np.int64)
    censored = 0
    for t in range(start_lo, start_hi):
        tau = first_passage_one(s, t, rho, tau_max)
        if tau < 0:
            censored += 1
        else:
            counts[tau] += 1
    return counts, censored


@njit(cache=True)
def block_order(starts, lengths, perm):
    """Source indices of the series obtained by laying out blocks in ``perm`` order."""
    total = 0
    for i in range(len(lengths)):
        total += lengths[i]
    out = np.empty(total, dtype=np.int64)
    pos = 0
    for j in range(len(perm)):
        b = perm[j]
        start = starts[b]
        for i in range(lengths[b]):
            out[pos] = start + i
            pos += 1
    return out
