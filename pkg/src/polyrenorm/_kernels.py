"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``POLYRENORM_DISABLE_NUMBA=1`` to force the numpy implementations.
Both implementations are always importable under ``*_np`` / ``*_nb`` names so
that tests and the benchmark can compare them directly.
"""

import os

import numpy as np

KIND_POWER = 0
KIND_DEFAULT = 1

BISECT_MAX_ITER = 200
BISECT_RTOL = 1e-12

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("POLYRENORM_DISABLE_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def orlicz_M_np(t, kind, param):
    t = np.asarray(t, dtype=np.float64)
    if kind == KIND_POWER:
        return t ** param
    out = np.zeros_like(t)
    low = (t > 0) & (t <= 0.5)
    out[low] = np.exp(2.0 - 1.0 / t[low]) / 3.0
    high = t > 0.5
    out[high] = (4.0 * t[high] - 1.0) / 3.0
    return out


def luxemburg_rows_np(absrows, kind, param, t_max=1.0, M=None):
    """Luxemburg norms of each row of ``absrows`` (non-negative entries).

    ``M`` overrides the built-in family selected by ``kind``/``param``.
    """
    if M is None:
        def M(t):
            return orlicz_M_np(t, kind, param)
    absrows = np.atleast_2d(np.asarray(absrows, dtype=np.float64))
    lo = absrows.max(axis=1, initial=0.0) / t_max
    hi = absrows.sum(axis=1)
    out = np.zeros(absrows.shape[0])
    active = hi > 0
    for _ in range(BISECT_MAX_ITER):
        active &= (hi - lo) > BISECT_RTOL * hi
        if not active.any():
            break
        rows = np.flatnonzero(active)
        mid = 0.5 * (lo[rows] + hi[rows])
        mod = M(absrows[rows] / mid[:, None]).sum(axis=1)
        ok = mod <= 1.0
        hi[rows[ok]] = mid[ok]
        lo[rows[~ok]] = mid[~ok]
    nz = hi > 0
    out[nz] = hi[nz]
    return out


def day_rows_np(absrows):
    absrows = np.atleast_2d(np.asarray(absrows, dtype=np.float64))
    v = -np.sort(-absrows, axis=1)
    w = 0.5 ** np.arange(1, v.shape[1] + 1)
    # scale by the largest modulus so squares neither underflow nor overflow
    top = v[:, :1] if v.shape[1] else np.zeros((v.shape[0], 1))
    safe = np.where(top > 0, top, 1.0)
    return top[:, 0] * np.sqrt(((v / safe) ** 2) @ w)


def summing_rows_np(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0])
    return np.abs(np.cumsum(rows, axis=1)).max(axis=1)


def summing_projection_sup_np(x):
    """For a dense head ``x[0..N-1]`` (x[i] = x(i+1)), the c0 sup norm of the
    summing-basis projection for every n = 1..N-1:
    max_{i<=n} |x(i) - x(n+1)|."""
    x = np.asarray(x, dtype=np.float64)
    cmax = np.maximum.accumulate(x)[:-1]
    cmin = np.minimum.accumulate(x)[:-1]
    nxt = x[1:]
    return np.maximum(np.abs(cmax - nxt), np.abs(nxt - cmin))


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _M_scalar(t, kind, param):
        if kind == KIND_POWER:
            return t ** param
        if t <= 0.0:
            return 0.0
        if t <= 0.5:
            return np.exp(2.0 - 1.0 / t) / 3.0
        return (4.0 * t - 1.0) / 3.0

    @numba.njit(cache=True)
    def orlicz_M_nb(t, kind, param):
        out = np.empty(t.shape[0])
        for i in range(t.shape[0]):
            out[i] = _M_scalar(t[i], kind, param)
        return out

    @numba.njit(cache=True)
    def _luxemburg_row(row, kind, param, t_max):
        lo = 0.0
        hi = 0.0
        for v in row:
            if v > lo:
                lo = v
            hi += v
        if hi == 0.0:
            return 0.0
        lo /= t_max
        for _ in range(BISECT_MAX_ITER):
            if hi - lo <= BISECT_RTOL * hi:
                break
            mid = 0.5 * (lo + hi)
            s = 0.0
            for v in row:
                s += _M_scalar(v / mid, kind, param)
            if s <= 1.0:
                hi = mid
            else:
                lo = mid
        return hi

    @numba.njit(cache=True)
    def luxemburg_rows_nb(absrows, kind, param, t_max=1.0):
        out = np.empty(absrows.shape[0])
        for r in range(absrows.shape[0]):
            out[r] = _luxemburg_row(absrows[r], kind, param, t_max)
        return out

    @numba.njit(cache=True)
    def day_rows_nb(absrows):
        out = np.empty(absrows.shape[0])
        n = absrows.shape[1]
        v = np.empty(n)
        for r in range(absrows.shape[0]):
            # insertion sort into decreasing order; rows are short
            for i in range(n):
                t = absrows[r, i]
                j = i
                while j > 0 and v[j - 1] < t:
                    v[j] = v[j - 1]
                    j -= 1
                v[j] = t
            top = v[0] if n else 0.0
            if top == 0.0:
                out[r] = 0.0
                continue
            s = 0.0
            w = 0.5
            for k in range(n):
                u = v[k] / top
                s += w * u * u
                w *= 0.5
            out[r] = top * np.sqrt(s)
        return out

    @numba.njit(cache=True)
    def summing_rows_nb(rows):
        out = np.zeros(rows.shape[0])
        for r in range(rows.shape[0]):
            s = 0.0
            best = 0.0
            for v in rows[r]:
                s += v
                if abs(s) > best:
                    best = abs(s)
            out[r] = best
        return out

    @numba.njit(cache=True)
    def summing_projection_sup_nb(x):
        n = x.shape[0] - 1
        out = np.empty(max(n, 0))
        cmax = -np.inf
        cmin = np.inf
        for i in range(n):
            if x[i] > cmax:
                cmax = x[i]
            if x[i] < cmin:
                cmin = x[i]
            nxt = x[i + 1]
            out[i] = max(abs(cmax - nxt), abs(nxt - cmin))
        return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def _as_rows(a):
    return np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=np.float64)))


def orlicz_M(t, kind, param):
    t = np.ascontiguousarray(np.asarray(t, dtype=np.float64))
    if USE_NUMBA:
        return orlicz_M_nb(t.ravel(), kind, float(param)).reshape(t.shape)
    return orlicz_M_np(t, kind, param)


def luxemburg_rows(absrows, kind, param, t_max=1.0):
    rows = _as_rows(absrows)
    if USE_NUMBA:
        return luxemburg_rows_nb(rows, kind, float(param), float(t_max))
    return luxemburg_rows_np(rows, kind, param, t_max)


def day_rows(absrows):
    rows = _as_rows(absrows)
    if USE_NUMBA:
        return day_rows_nb(rows)
    return day_rows_np(rows)


def summing_rows(rows):
    rows = _as_rows(rows)
    if USE_NUMBA:
        return summing_rows_nb(rows)
    return summing_rows_np(rows)


def summing_projection_sup(x):
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if USE_NUMBA:
        return summing_projection_sup_nb(x)
    return summing_projection_sup_np(x)


def subset_masks(n):
    """Boolean matrix of shape (2**n, n); row b marks the bits of b."""
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def sign_patterns(n):
    """All sign vectors in {-1, +1}^n with first entry +1 (2**(n-1) rows)."""
    if n == 0:
        return np.ones((1, 0))
    m = subset_masks(n - 1)
    return np.hstack([np.ones((m.shape[0], 1)), np.where(m, -1.0, 1.0)])
