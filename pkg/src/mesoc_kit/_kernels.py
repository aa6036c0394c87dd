"""Hot numeric loops, JIT-compiled when numba is available.

The pool-adjacent-violators sweep below is the single data-dependent loop in
the package that cannot be vectorized, so it is the one place numba pays off.
Setting the environment variable ``MESOC_KIT_NO_NUMBA=1`` forces the pure
NumPy/Python fallback even when numba is importable; everything else about the
two paths is identical (same source, same results).
"""

import os

import numpy as np

_FORCED_OFF = os.environ.get("MESOC_KIT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _FORCED_OFF:
        raise ImportError("numba disabled via MESOC_KIT_NO_NUMBA")
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    prange = range

    def njit(*args, **kwargs):  # no-op decorator for the fallback path
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def isotonic_decreasing(y):
    """Least-squares fit of ``y`` by a nonincreasing vector.

    Pool-adjacent-violators with a single left-to-right sweep: adjacent blocks
    are merged (replacing both with their exact mean) whenever a later block
    mean is >= an earlier one.  Returns ``(fit, block_starts, block_lengths)``.
    """
    n = y.shape[0]
    means = np.empty(n)
    counts = np.empty(n, np.int64)
    starts = np.empty(n, np.int64)
    k = -1
    for j in range(n):
        k += 1
        means[k] = y[j]
        counts[k] = 1
        starts[k] = j
        while k > 0 and means[k - 1] <= means[k]:
            total = counts[k - 1] + counts[k]
            means[k - 1] += counts[k] * (means[k] - means[k - 1]) / total
            counts[k - 1] = total
            k -= 1
    out = np.empty(n)
    for b in range(k + 1):
        lo = starts[b]
        hi = lo + counts[b]
        for j in range(lo, hi):
            out[j] = means[b]
    return out, starts[: k + 1].copy(), counts[: k + 1].copy()


@njit(cache=True, parallel=True)
def isotonic_decreasing_batch(rows):
    """Row-wise :func:`isotonic_decreasing` without block bookkeeping."""
    m, n = rows.shape
    out = np.empty_like(rows)
    for r in prange(m):
        means = np.empty(n)
        counts = np.empty(n, np.int64)
        starts = np.empty(n, np.int64)
        k = -1
        for j in range(n):
            k += 1
            means[k] = rows[r, j]
            counts[k] = 1
            starts[k] = j
            while k > 0 and means[k - 1] <= means[k]:
                total = counts[k - 1] + counts[k]
                means[k - 1] += counts[k] * (means[k] - means[k - 1]) / total
                counts[k - 1] = total
                k -= 1
        for b in range(k + 1):
            lo = starts[b]
            hi = lo + counts[b]
            for j in range(lo, hi):
                out[r, j] = means[b]
    return out


def warmup():
    """Trigger JIT compilation once so later calls run at full speed."""
    isotonic_decreasing(np.array([1.0, 2.0, 0.5]))
    isotonic_decreasing_batch(np.array([[1.0, 2.0], [0.5, 0.25]]))
