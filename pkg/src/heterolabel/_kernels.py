"""Hot loops: pairwise L2 distances and the monotonic Viterbi DP.

Each kernel has a numba ``@njit`` version and a pure-numpy version. The
numba path is used when numba imports and ``HETEROLABEL_NO_NUMBA`` is unset
or ``0``. Both paths accumulate in the same order and give bit-identical
results.
"""

import os

import numpy as np

_disabled = os.environ.get("HETEROLABEL_NO_NUMBA", "0") not in ("", "0")

try:
    if _disabled:
        raise ImportError
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


def pairwise_l2_numpy(a, b):
    # accumulate over the encoding axis in order so the sum matches the
    # numba loop bit for bit; the |a|^2 - 2ab + |b|^2 shortcut would not
    acc = np.zeros((a.shape[0], b.shape[0]))
    for k in range(a.shape[1]):
        t = a[:, k, None] - b[None, :, k]
        acc += t * t
    return np.sqrt(acc)


def viterbi_numpy(dist):
    """Lexicographically smallest minimum-cost monotonic surjective path.

    ``suffix[i, j]`` is the cheapest cost of frames ``j..M-1`` given frame
    ``j`` sits on token ``i``; a forward pass then stays on the current
    token whenever that is no worse than advancing.
    """
    n, m = dist.shape
    suffix = np.full((n, m), np.inf)
    suffix[n - 1, m - 1] = dist[n - 1, m - 1]
    for j in range(m - 2, -1, -1):
        nxt = suffix[:, j + 1]
        best = nxt.copy()
        np.minimum(best[:-1], nxt[1:], out=best[:-1])
        lo = max(0, n - (m - j))
        hi = min(n - 1, j)
        suffix[lo:hi + 1, j] = dist[lo:hi + 1, j] + best[lo:hi + 1]
    path = np.empty(m, dtype=np.int64)
    i = 0
    path[0] = 0
    for j in range(1, m):
        if i + 1 < n and suffix[i + 1, j] < suffix[i, j]:
            i += 1
        path[j] = i
    return path


if njit is not None:

    @njit(cache=True)
    def pairwise_l2_numba(a, b):
        n, d = a.shape
        m = b.shape[0]
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(d):
                    t = a[i, k] - b[j, k]
                    acc += t * t
                out[i, j] = np.sqrt(acc)
        return out

    @njit(cache=True)
    def viterbi_numba(dist):
        n, m = dist.shape
        suffix = np.full((n, m), np.inf)
        suffix[n - 1, m - 1] = dist[n - 1, m - 1]
        for j in range(m - 2, -1, -1):
            lo = max(0, n - (m - j))
            hi = min(n - 1, j)
            for i in range(lo, hi + 1):
                best = suffix[i, j + 1]
                if i + 1 < n and suffix[i + 1, j + 1] < best:
                    best = suffix[i + 1, j + 1]
                suffix[i, j] = dist[i, j] + best
        path = np.empty(m, dtype=np.int64)
        i = 0
        path[0] = 0
        for j in range(1, m):
            if i + 1 < n and suffix[i + 1, j] < suffix[i, j]:
                i += 1
            path[j] = i
        return path

    pairwise_l2 = pairwise_l2_numba
    viterbi = viterbi_numba
else:
    pairwise_l2 = pairwise_l2_numpy
    viterbi = viterbi_numpy
