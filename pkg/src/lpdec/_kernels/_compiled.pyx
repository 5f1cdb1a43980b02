# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: one Mehrotra predictor-corrector step and a dense
two-phase Bland simplex. Mirrors _py.py; keep the two in sync."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, isfinite, sqrt
from scipy.linalg.cython_blas cimport dgemv, dsyrk
from scipy.linalg.cython_lapack cimport dpotrf, dpotrs

cnp.import_array()

STEP_OK = 0
STEP_FACTORIZATION_FAILED = 1
STEP_NOT_FINITE = 2

LP_OPTIMAL = 0
LP_INFEASIBLE = 1
LP_UNBOUNDED = 2
LP_PIVOT_LIMIT = 3

cdef double _D_MAX = 1e16


cdef void _a_dot(const double[:, ::1] A, const double* v, double* out) noexcept:
    """out = A @ v; the Fortran view of C-contiguous A (m, n) is A^T (n, m)."""
    cdef int m = <int> A.shape[0]
    cdef int n = <int> A.shape[1]
    cdef double one = 1.0, zero = 0.0
    cdef int inc = 1
    dgemv("T", &n, &m, &one, <double*> &A[0, 0], &n, <double*> v, &inc, &zero, out, &inc)


cdef void _at_dot(const double[:, ::1] A, const double* w, double* out) noexcept:
    """out = A.T @ w."""
    cdef int m = <int> A.shape[0]
    cdef int n = <int> A.shape[1]
    cdef double one = 1.0, zero = 0.0
    cdef int inc = 1
    dgemv("N", &n, &m, &one, <double*> &A[0, 0], &n, <double*> w, &inc, &zero, out, &inc)


cdef double _max_step(const double[::1] v, const double[::1] dv) noexcept:
    cdef double best = INFINITY
    cdef double r
    cdef Py_ssize_t j
    for j in range(v.shape[0]):
        if dv[j] < 0.0:
            r = v[j] / -dv[j]
            if r < best:
                best = r
    return best


def pd_step_kernel(const double[:, ::1] A, const double[::1] b, const double[::1] c,
                   const double[::1] x, const double[::1] y, const double[::1] s,
                   double reg, double eta):
    """One predictor-corrector iteration on min c'x s.t. Ax=b, x>=0.

    Returns (x, y, s, r_p, r_d, mu, cx, by, status) with residuals at the
    new point.
    """
    cdef int m = <int> A.shape[0]
    cdef int n = <int> A.shape[1]
    cdef Py_ssize_t i, j
    cdef double mu = 0.0

    rb_arr = np.empty(m); rc_arr = np.empty(n)
    d_arr = np.empty(n); tmp_arr = np.empty(n); adrc_arr = np.empty(m)
    W_arr = np.empty((m, n)); M_arr = np.empty((m, m))
    dy_aff_arr = np.empty(m); ds_aff_arr = np.empty(n); dx_aff_arr = np.empty(n)
    w_arr = np.empty(n); dy_arr = np.empty(m); ds_arr = np.empty(n); dx_arr = np.empty(n)
    xn_arr = np.empty(n); yn_arr = np.empty(m); sn_arr = np.empty(n)
    cdef double[::1] rb = rb_arr, rc = rc_arr, d = d_arr, tmp = tmp_arr
    cdef double[::1] adrc = adrc_arr
    cdef double[:, ::1] W = W_arr
    cdef double[:, ::1] M = M_arr
    cdef double[::1] dy_aff = dy_aff_arr, ds_aff = ds_aff_arr, dx_aff = dx_aff_arr
    cdef double[::1] w = w_arr, dy = dy_arr, ds = ds_arr, dx = dx_arr
    cdef double[::1] xn = xn_arr, yn = yn_arr, sn = sn_arr

    _a_dot(A, &x[0], &rb[0])
    for i in range(m):
        rb[i] -= b[i]
    _at_dot(A, &y[0], &rc[0])
    for j in range(n):
        rc[j] += s[j] - c[j]
        mu += x[j] * s[j]
    mu /= n

    cdef double dj
    for j in range(n):
        dj = x[j] / s[j]
        d[j] = dj if dj < _D_MAX else _D_MAX
        tmp[j] = sqrt(d[j])
    for i in range(m):
        for j in range(n):
            W[i, j] = A[i, j] * tmp[j]

    # M = W @ W.T via dsyrk on the Fortran view W^T (n, m). The Fortran-lower
    # triangle used by potrf/potrs is the numpy upper triangle M[i, j], j >= i;
    # mirror it into the numpy lower triangle to keep M whole.
    cdef double one = 1.0, zero = 0.0
    dsyrk("L", "T", &m, &n, &one, &W[0, 0], &n, &zero, &M[0, 0], &m)
    cdef bint bad = 0
    for i in range(m):
        M[i, i] += reg
        if not isfinite(M[i, i]):
            bad = 1
        for j in range(i + 1, m):
            if not isfinite(M[i, j]):
                bad = 1
            M[j, i] = M[i, j]
    if bad:
        return (np.asarray(x), np.asarray(y), np.asarray(s),
                0.0, 0.0, mu, 0.0, 0.0, STEP_NOT_FINITE)

    cdef int info = 0, one_i = 1
    dpotrf("L", &m, &M[0, 0], &m, &info)
    if info != 0:
        return (np.asarray(x), np.asarray(y), np.asarray(s),
                0.0, 0.0, mu, 0.0, 0.0, STEP_FACTORIZATION_FAILED)

    # predictor
    for j in range(n):
        tmp[j] = d[j] * rc[j]
    _a_dot(A, &tmp[0], &adrc[0])
    for i in range(m):
        dy_aff[i] = b[i] - adrc[i]
    dpotrs("L", &m, &one_i, &M[0, 0], &m, &dy_aff[0], &m, &info)
    _at_dot(A, &dy_aff[0], &ds_aff[0])
    for j in range(n):
        ds_aff[j] = -rc[j] - ds_aff[j]
        dx_aff[j] = -x[j] - d[j] * ds_aff[j]

    cdef double ap_aff = _max_step(x, dx_aff)
    cdef double ad_aff = _max_step(s, ds_aff)
    if ap_aff > 1.0:
        ap_aff = 1.0
    if ad_aff > 1.0:
        ad_aff = 1.0
    cdef double mu_aff = 0.0
    for j in range(n):
        mu_aff += (x[j] + ap_aff * dx_aff[j]) * (s[j] + ad_aff * ds_aff[j])
    mu_aff /= n
    cdef double sigma = 0.0, ratio
    if mu > 0.0:
        ratio = mu_aff / mu
        if ratio < 0.0:
            ratio = 0.0
        sigma = ratio * ratio * ratio
        if sigma > 1.0:
            sigma = 1.0

    # corrector (same factorization)
    for j in range(n):
        w[j] = (dx_aff[j] * ds_aff[j] - sigma * mu) / s[j]
    _a_dot(A, &w[0], &dy[0])
    for i in range(m):
        dy[i] = b[i] + dy[i] - adrc[i]
    dpotrs("L", &m, &one_i, &M[0, 0], &m, &dy[0], &m, &info)
    _at_dot(A, &dy[0], &ds[0])
    for j in range(n):
        ds[j] = -rc[j] - ds[j]
        dx[j] = -x[j] - w[j] - d[j] * ds[j]

    cdef double ap = eta * _max_step(x, dx)
    cdef double ad = eta * _max_step(s, ds)
    if ap > 1.0:
        ap = 1.0
    if ad > 1.0:
        ad = 1.0

    for j in range(n):
        xn[j] = x[j] + ap * dx[j]
        sn[j] = s[j] + ad * ds[j]
    for i in range(m):
        yn[i] = y[i] + ad * dy[i]

    # stats at the new point
    cdef double r_p = 0.0, r_d = 0.0, mu_n = 0.0, cx = 0.0, by = 0.0, v
    _a_dot(A, &xn[0], &rb[0])
    for i in range(m):
        v = fabs(rb[i] - b[i])
        if v > r_p:
            r_p = v
        by += b[i] * yn[i]
    _at_dot(A, &yn[0], &rc[0])
    for j in range(n):
        v = fabs(rc[j] + sn[j] - c[j])
        if v > r_d:
            r_d = v
        mu_n += xn[j] * sn[j]
        cx += c[j] * xn[j]
    mu_n /= n
    if not (isfinite(r_p) and isfinite(r_d) and isfinite(mu_n)
            and isfinite(cx) and isfinite(by)):
        return (np.asarray(x), np.asarray(y), np.asarray(s),
                0.0, 0.0, mu, 0.0, 0.0, STEP_NOT_FINITE)
    return xn_arr, yn_arr, sn_arr, r_p, r_d, mu_n, cx, by, STEP_OK


cdef void _pivot(double[:, ::1] T, cnp.int64_t[::1] basis, Py_ssize_t row,
                 Py_ssize_t col) noexcept:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t cols = T.shape[1]
    cdef double pivval = T[row, col]
    cdef double factor
    for j in range(cols):
        T[row, j] /= pivval
    for i in range(rows):
        if i == row:
            continue
        factor = T[i, col]
        if factor != 0.0:
            for j in range(cols):
                T[i, j] -= factor * T[row, j]
    basis[row] = col


cdef int _bland_loop(double[:, ::1] T, cnp.int64_t[::1] basis, Py_ssize_t n_enter,
                     Py_ssize_t m, double tol, long max_pivots, long* pivots) noexcept:
    """Entering: smallest index with reduced cost < -tol; leaving: min ratio,
    ties by smallest basic variable index."""
    cdef Py_ssize_t col, row, i, j
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef double best, ratio
    cdef cnp.int64_t best_basis
    while True:
        col = -1
        for j in range(n_enter):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            return LP_OPTIMAL
        row = -1
        best = INFINITY
        best_basis = 0
        for i in range(m):
            if T[i, col] > tol:
                ratio = T[i, rhs] / T[i, col]
                if row < 0 or ratio < best - 1e-15:
                    best = ratio
                    row = i
                    best_basis = basis[i]
                elif ratio <= best + 1e-15 and basis[i] < best_basis:
                    row = i
                    best_basis = basis[i]
        if row < 0:
            return LP_UNBOUNDED
        _pivot(T, basis, row, col)
        pivots[0] += 1
        if pivots[0] >= max_pivots:
            return LP_PIVOT_LIMIT


def simplex_kernel(A_in, b_in, c_in, double tol, long max_pivots):
    """Two-phase dense tableau simplex with Bland's rule.

    Solves min c'x s.t. Ax=b, x>=0. Returns (status, x, value, pivots).
    """
    A_arr = np.array(A_in, dtype=np.float64, order="C")
    b_arr = np.array(b_in, dtype=np.float64)
    c_arr = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef double[:, ::1] A = A_arr
    cdef double[::1] b = b_arr
    cdef double[::1] c = c_arr
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t i, j, r

    for i in range(m):
        if b[i] < 0.0:
            b[i] = -b[i]
            for j in range(n):
                A[i, j] = -A[i, j]

    T_arr = np.zeros((m + 1, n + m + 1))
    basis_arr = np.arange(n, n + m, dtype=np.int64)
    cdef double[:, ::1] T = T_arr
    cdef cnp.int64_t[::1] basis = basis_arr
    cdef double colsum, bsum = 0.0
    for i in range(m):
        for j in range(n):
            T[i, j] = A[i, j]
        T[i, n + i] = 1.0
        T[i, n + m] = b[i]
        bsum += b[i]
    for j in range(n):
        colsum = 0.0
        for i in range(m):
            colsum += A[i, j]
        T[m, j] = -colsum
    T[m, n + m] = -bsum

    cdef long pivots = 0
    cdef int status = _bland_loop(T, basis, n, m, tol, max_pivots, &pivots)
    if status == LP_PIVOT_LIMIT:
        return status, np.zeros(n), 0.0, pivots
    if -T[m, n + m] > 1e-7:
        return LP_INFEASIBLE, np.zeros(n), 0.0, pivots

    # drive artificials out where possible; leftover rows are redundant and
    # stay inert (all-zero in original columns)
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if fabs(T[i, j]) > tol:
                    _pivot(T, basis, i, j)
                    pivots += 1
                    break

    for j in range(n + m + 1):
        T[m, j] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    cdef double cj
    for i in range(m):
        j = <Py_ssize_t> basis[i]
        if j < n and c[j] != 0.0:
            cj = c[j]
            for r in range(n + m + 1):
                T[m, r] -= cj * T[i, r]

    status = _bland_loop(T, basis, n, m, tol, max_pivots, &pivots)
    if status != LP_OPTIMAL:
        return status, np.zeros(n), 0.0, pivots

    x_arr = np.zeros(n + m)
    cdef double[::1] x = x_arr
    for i in range(m):
        x[<Py_ssize_t> basis[i]] = T[i, n + m]
    cdef double value = 0.0
    for j in range(n):
        value += c[j] * x[j]
    return LP_OPTIMAL, x_arr[:n].copy(), value, pivots
