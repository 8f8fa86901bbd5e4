"""Dense bounded-variable primal simplex, written for numba's nopython mode.

This file is imported twice: once as plain numpy code and once as a copy
whose helpers are replaced by compiled versions (see ``_kernels``).
"""

import numpy as np

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_ITERATION_LIMIT = 3

# Consecutive degenerate pivots before switching to Bland's rule.
DEGENERATE_SWITCH = 50


def _iterate(T, xb, basis, at_upper, is_basic, ub, d, allowed, max_iter, tol):
    m, ncols = T.shape
    iters = 0
    degenerate = 0
    bland = False
    big = ncols + 1
    while iters < max_iter:
        score = np.where(at_upper, -d, d)
        eligible = allowed & ~is_basic & (ub > 0.0) & (score > tol)
        if not eligible.any():
            return STATUS_OPTIMAL, iters
        if bland:
            j = int(np.argmax(eligible))
        else:
            j = int(np.argmax(np.where(eligible, score, -np.inf)))
        s = -1.0 if at_upper[j] else 1.0
        col = T[:, j] * s

        limits = np.full(m, np.inf)
        ubb = np.empty(m)
        for i in range(m):
            ubb[i] = ub[basis[i]]
        for i in range(m):
            if col[i] > tol:
                limits[i] = max(xb[i], 0.0) / col[i]
            elif col[i] < -tol and ubb[i] < np.inf:
                limits[i] = max(ubb[i] - xb[i], 0.0) / (-col[i])
        tmin = limits.min() if m > 0 else np.inf
        if ub[j] <= tmin:
            t = ub[j]
            if t == np.inf:
                return STATUS_UNBOUNDED, iters
            xb -= t * col
            at_upper[j] = not at_upper[j]
        else:
            t = tmin
            r = -1
            best_idx = big
            for i in range(m):
                if limits[i] <= tmin + 1e-12 and basis[i] < best_idx:
                    best_idx = basis[i]
                    r = i
            xb -= t * col
            leaving = basis[r]
            is_basic[leaving] = False
            at_upper[leaving] = col[r] < 0.0
            entering_value = ub[j] - t if at_upper[j] else t
            at_upper[j] = False
            piv = T[r, j]
            T[r, :] = T[r, :] / piv
            colj = T[:, j].copy()
            colj[r] = 0.0
            T -= np.outer(colj, T[r, :])
            d -= d[j] * T[r, :]
            basis[r] = j
            is_basic[j] = True
            xb[r] = entering_value
        iters += 1
        if t <= tol:
            degenerate += 1
            if degenerate >= DEGENERATE_SWITCH:
                bland = True
        else:
            degenerate = 0
    return STATUS_ITERATION_LIMIT, iters


def _column_values(xb, basis, at_upper, ub, ncols):
    vals = np.where(at_upper, ub, 0.0)
    for i in range(basis.shape[0]):
        vals[basis[i]] = xb[i]
    return vals


def simplex(A, b, c, lo, hi, max_iter, tol):
    """Maximize ``c @ x`` subject to ``A @ x <= b`` and ``lo <= x <= hi``.

    Returns ``(status, x, y, objective, iterations)``.  On optimality ``y``
    holds nonnegative row duals.  On infeasibility ``y`` is a nonnegative
    multiplier vector with ``y @ b < min over the box of (y @ A) @ x``.
    """
    m, n = A.shape
    width = hi - lo
    bp = b - A @ lo
    n_art = 0
    for i in range(m):
        if bp[i] < -tol:
            n_art += 1
    ncols = n + m + n_art
    T = np.zeros((m, ncols))
    xb = np.zeros(m)
    basis = np.zeros(m, dtype=np.int64)
    is_basic = np.zeros(ncols, dtype=np.bool_)
    at_upper = np.zeros(ncols, dtype=np.bool_)
    ub = np.full(ncols, np.inf)
    ub[:n] = width
    k = 0
    for i in range(m):
        if bp[i] < -tol:
            T[i, :n] = -A[i, :]
            T[i, n + i] = -1.0
            T[i, n + m + k] = 1.0
            basis[i] = n + m + k
            xb[i] = -bp[i]
            k += 1
        else:
            T[i, :n] = A[i, :]
            T[i, n + i] = 1.0
            basis[i] = n + i
            xb[i] = bp[i]
        is_basic[basis[i]] = True

    allowed = np.ones(ncols, dtype=np.bool_)
    total_iters = 0
    y = np.zeros(m)
    if n_art > 0:
        cost = np.zeros(ncols)
        cost[n + m:] = -1.0
        cb = np.zeros(m)
        for i in range(m):
            cb[i] = cost[basis[i]]
        d = cost - cb @ T
        status, it = _iterate(T, xb, basis, at_upper, is_basic, ub, d, allowed, max_iter, tol)
        total_iters += it
        if status == STATUS_ITERATION_LIMIT:
            return status, lo.copy(), y, 0.0, total_iters
        infeas = 0.0
        for i in range(m):
            if basis[i] >= n + m:
                infeas += xb[i]
        if infeas > tol * (1.0 + np.abs(bp).max()):
            for i in range(m):
                y[i] = max(-d[n + i], 0.0) + 0.0
            return STATUS_INFEASIBLE, lo.copy(), y, 0.0, total_iters
        ub[n + m:] = 0.0
        allowed[n + m:] = False

    cost = np.zeros(ncols)
    cost[:n] = c
    cb = np.zeros(m)
    for i in range(m):
        cb[i] = cost[basis[i]]
    d = cost - cb @ T
    status, it = _iterate(T, xb, basis, at_upper, is_basic, ub, d, allowed, max_iter, tol)
    total_iters += it
    vals = _column_values(xb, basis, at_upper, ub, ncols)
    x = lo + vals[:n]
    x = np.minimum(np.maximum(x, lo), hi)
    for i in range(m):
        y[i] = max(-d[n + i], 0.0) + 0.0
    return status, x, y, float(c @ x), total_iters
