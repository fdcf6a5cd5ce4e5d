"""Hot inner loops, in a numba-compiled and a pure-numpy flavour.

The numba versions are used when numba imports and the environment variable
``BANK_EWS_DISABLE_NUMBA`` is unset (or ``0``). Both flavours are always
importable under explicit names so tests and benchmarks can compare them.
"""

import os

import numpy as np

_DISABLED = os.environ.get("BANK_EWS_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by BANK_EWS_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


# -- pure numpy ---------------------------------------------------------------


def scatter_numpy(X, labels):
    """Class means (2, d) and summed within-class scatter (d, d).

    ``labels`` holds 0 (healthy) / 1 (distressed).
    """
    d = X.shape[1]
    means = np.zeros((2, d))
    scatter = np.zeros((d, d))
    for c in (0, 1):
        Xc = X[labels == c]
        if Xc.shape[0] == 0:
            continue
        mu = Xc.mean(axis=0)
        centered = Xc - mu
        means[c] = mu
        scatter += centered.T @ centered
    return means, scatter


def sweep_numpy(scores, distressed, thresholds):
    """Type I (fn) and Type II (fp) counts at each threshold.

    A point is predicted distressed iff ``score >= threshold``.
    """
    d_sorted = np.sort(scores[distressed])
    h_sorted = np.sort(scores[~distressed])
    fn = np.searchsorted(d_sorted, thresholds, side="left").astype(np.int64)
    fp = (h_sorted.size - np.searchsorted(h_sorted, thresholds, side="left")).astype(np.int64)
    return fn, fp


# -- numba --------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def scatter_numba(X, labels):
        n, d = X.shape
        means = np.zeros((2, d))
        counts = np.zeros(2)
        for i in range(n):
            c = labels[i]
            counts[c] += 1.0
            for j in range(d):
                means[c, j] += X[i, j]
        for c in range(2):
            if counts[c] > 0:
                for j in range(d):
                    means[c, j] /= counts[c]
        scatter = np.zeros((d, d))
        diff = np.empty(d)
        for i in range(n):
            c = labels[i]
            for j in range(d):
                diff[j] = X[i, j] - means[c, j]
            for j in range(d):
                dj = diff[j]
                for k in range(j, d):
                    scatter[j, k] += dj * diff[k]
        for j in range(d):
            for k in range(j + 1, d):
                scatter[k, j] = scatter[j, k]
        return means, scatter

    @njit(cache=True)
    def sweep_numba(scores, distressed, thresholds):
        order = np.argsort(scores, kind="mergesort")
        n = scores.size
        m = thresholds.size
        n_healthy = 0
        for i in range(n):
            if not distressed[i]:
                n_healthy += 1
        fn = np.zeros(m, dtype=np.int64)
        fp = np.zeros(m, dtype=np.int64)
        below_d = 0
        below_h = 0
        p = 0
        # thresholds must be ascending
        for t in range(m):
            while p < n and scores[order[p]] < thresholds[t]:
                if distressed[order[p]]:
                    below_d += 1
                else:
                    below_h += 1
                p += 1
            fn[t] = below_d
            fp[t] = n_healthy - below_h
        return fn, fp

else:
    scatter_numba = None
    sweep_numba = None


BACKEND = "numba" if HAS_NUMBA else "numpy"


def within_class_scatter(X, labels):
    X = np.ascontiguousarray(X, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if HAS_NUMBA:
        return scatter_numba(X, labels)
    return scatter_numpy(X, labels)


def sweep_error_counts(scores, distressed, thresholds):
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    distressed = np.ascontiguousarray(distressed, dtype=np.bool_)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    if HAS_NUMBA:
        return sweep_numba(scores, distressed, thresholds)
    return sweep_numpy(scores, distressed, thresholds)
