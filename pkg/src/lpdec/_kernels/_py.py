"""Pure-numpy kernels: one Mehrotra predictor-corrector step and a dense
two-phase Bland simplex. The compiled module mirrors these exactly; keep the
two in sync."""
from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

# pd_step statuses
STEP_OK = 0
STEP_FACTORIZATION_FAILED = 1
STEP_NOT_FINITE = 2

# simplex statuses
LP_OPTIMAL = 0
LP_INFEASIBLE = 1
LP_UNBOUNDED = 2
LP_PIVOT_LIMIT = 3

_D_MAX = 1e16


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    """Largest alpha with v + alpha*dv >= 0 (inf when dv >= 0)."""
    neg = dv < 0.0
    if not neg.any():
        return np.inf
    return float(np.min(v[neg] / -dv[neg]))


def pd_step_kernel(A, b, c, x, y, s, reg, eta):
    """One predictor-corrector iteration on min c'x s.t. Ax=b, x>=0.

    Normal equations (A D A') solved by dense Cholesky with static diagonal
    regularization. Returns (x, y, s, r_p, r_d, mu, cx, by, status) with the
    residuals evaluated at the new point.
    """
    m, n = A.shape
    rb = A @ x - b
    rc = A.T @ y + s - c
    mu = float(x @ s) / n

    d = np.minimum(x / s, _D_MAX)
    w_scaled = A * np.sqrt(d)
    M = w_scaled @ w_scaled.T
    M.flat[:: m + 1] += reg
    if not np.isfinite(M).all():
        return x, y, s, 0.0, 0.0, mu, 0.0, 0.0, STEP_NOT_FINITE
    try:
        factor = cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return x, y, s, 0.0, 0.0, mu, 0.0, 0.0, STEP_FACTORIZATION_FAILED

    def solve(rhs):
        return cho_solve(factor, rhs, check_finite=False)

    a_drc = A @ (d * rc)

    # predictor (affine scaling) direction
    dy_aff = solve(b - a_drc)
    ds_aff = -rc - A.T @ dy_aff
    dx_aff = -x - d * ds_aff

    ap_aff = min(1.0, _max_step(x, dx_aff))
    ad_aff = min(1.0, _max_step(s, ds_aff))
    mu_aff = float((x + ap_aff * dx_aff) @ (s + ad_aff * ds_aff)) / n
    sigma = 0.0 if mu <= 0.0 else min(1.0, max(0.0, mu_aff / mu) ** 3)

    # corrector
    w = (dx_aff * ds_aff - sigma * mu) / s
    dy = solve(b + A @ w - a_drc)
    ds = -rc - A.T @ dy
    dx = -x - w - d * ds

    ap = min(1.0, eta * _max_step(x, dx))
    ad = min(1.0, eta * _max_step(s, ds))

    xn = x + ap * dx
    yn = y + ad * dy
    sn = s + ad * ds

    r_p = float(np.abs(A @ xn - b).max(initial=0.0))
    r_d = float(np.abs(A.T @ yn + sn - c).max(initial=0.0))
    mu_n = float(xn @ sn) / n
    cx = float(c @ xn)
    by = float(b @ yn)
    if not np.isfinite([r_p, r_d, mu_n, cx, by]).all():
        return x, y, s, 0.0, 0.0, mu, 0.0, 0.0, STEP_NOT_FINITE
    return xn, yn, sn, r_p, r_d, mu_n, cx, by, STEP_OK


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _bland_loop(T, basis, n_enter, m, tol, max_pivots, pivots):
    """Bland pivoting on the tableau until optimal/unbounded/limit.

    Entering: smallest column index < n_enter with reduced cost < -tol.
    Leaving: minimum ratio, ties broken by smallest basic variable index
    (single forward scan, identical to the compiled kernel).
    """
    while True:
        reduced = T[-1, :n_enter]
        candidates = np.nonzero(reduced < -tol)[0]
        if candidates.size == 0:
            return LP_OPTIMAL, pivots
        col = int(candidates[0])
        colvals = T[:m, col]
        rows = np.nonzero(colvals > tol)[0]
        if rows.size == 0:
            return LP_UNBOUNDED, pivots
        ratios = T[rows, -1] / colvals[rows]
        row = -1
        best = np.inf
        best_basis = 0
        for i, ratio in zip(rows, ratios):
            if row < 0 or ratio < best - 1e-15:
                best = ratio
                row = int(i)
                best_basis = basis[i]
            elif ratio <= best + 1e-15 and basis[i] < best_basis:
                row = int(i)
                best_basis = basis[i]
        _pivot(T, basis, row, col)
        pivots += 1
        if pivots >= max_pivots:
            return LP_PIVOT_LIMIT, pivots


def simplex_kernel(A, b, c, tol, max_pivots):
    """Two-phase dense tableau simplex with Bland's rule.

    Solves min c'x s.t. Ax=b, x>=0. Returns (status, x, value, pivots).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape

    flip = b < 0.0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # columns: n originals, m artificials, rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = np.arange(n, n + m)

    # phase 1: minimize the artificial sum; cost row holds reduced costs
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()

    status, pivots = _bland_loop(T, basis, n, m, tol, max_pivots, 0)
    if status == LP_PIVOT_LIMIT:
        return status, np.zeros(n), 0.0, pivots
    if -T[-1, -1] > 1e-7:
        return LP_INFEASIBLE, np.zeros(n), 0.0, pivots

    # drive artificials out of the basis where a pivot exists; rows without
    # one are redundant and stay inert (all-zero in original columns)
    for row in range(m):
        if basis[row] >= n:
            cols = np.nonzero(np.abs(T[row, :n]) > tol)[0]
            if cols.size:
                _pivot(T, basis, row, int(cols[0]))
                pivots += 1

    # phase 2 cost row over the original columns
    T[-1] = 0.0
    T[-1, :n] = c
    for row in range(m):
        j = basis[row]
        if j < n and c[j] != 0.0:
            T[-1] -= c[j] * T[row]

    status, pivots = _bland_loop(T, basis, n, m, tol, max_pivots, pivots)
    if status != LP_OPTIMAL:
        return status, np.zeros(n), 0.0, pivots

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    x = x[:n]
    return LP_OPTIMAL, x, float(c @ x), pivots
