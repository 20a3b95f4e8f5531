# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-stencil kernels: divided-difference bands and the reduced
SPD solve that turns a feasible rule into the minimum-variance one.

Mirrors ``mvapprox._pykernels`` exactly; see that module for the contract.
The band structure is exploited directly (never materializing the dense
annihilation matrix), which is what makes this faster than the numpy path
for the small stencils the subdivision and sweep loops hammer on.
"""

import numpy as np

from libc.math cimport fabs, sqrt

BACKEND_NAME = "compiled"


cdef void _chol_solve(const double[:, ::1] L, double[::1] vec) noexcept:
    # solve (L L^T) vec = vec in place, L lower triangular
    cdef Py_ssize_t m = L.shape[0]
    cdef Py_ssize_t r, i
    cdef double acc
    for r in range(m):
        acc = vec[r]
        for i in range(r):
            acc -= L[r, i] * vec[i]
        vec[r] = acc / L[r, r]
    for r in range(m - 1, -1, -1):
        acc = vec[r]
        for i in range(r + 1, m):
            acc -= L[i, r] * vec[i]
        vec[r] = acc / L[r, r]


cdef double _hager_estimate(const double[:, ::1] L, double norm1):
    # 1-norm condition estimate of the factored SPD matrix; mirrors the
    # python backend so both report comparable numbers
    cdef Py_ssize_t m = L.shape[0]
    if m == 0:
        return 1.0
    work_np = np.full(m, 1.0 / m)
    probe_np = np.empty(m)
    cdef double[::1] x = work_np
    cdef double[::1] z = probe_np
    cdef Py_ssize_t i, j, iteration
    cdef double estimate = 0.0, new_estimate, zmax, zx
    for iteration in range(5):
        for i in range(m):
            z[i] = x[i]
        _chol_solve(L, z)
        new_estimate = 0.0
        for i in range(m):
            new_estimate += fabs(z[i])
        for i in range(m):
            z[i] = 1.0 if z[i] >= 0 else -1.0
        _chol_solve(L, z)
        j = 0
        zmax = fabs(z[0])
        for i in range(1, m):
            if fabs(z[i]) > zmax:
                zmax = fabs(z[i])
                j = i
        zx = 0.0
        for i in range(m):
            zx += z[i] * x[i]
        if iteration > 0 and (new_estimate <= estimate or zmax <= zx):
            if new_estimate > estimate:
                estimate = new_estimate
            break
        estimate = new_estimate
        for i in range(m):
            x[i] = 0.0
        x[j] = 1.0
    return norm1 * estimate


cdef void _dd_rows(const double[::1] x, int d, double[:, ::1] rows) noexcept:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j, i, k
    cdef double p, m
    for j in range(n - d):
        m = 0.0
        for i in range(d + 1):
            p = 1.0
            for k in range(d + 1):
                if k != i:
                    p *= x[j + i] - x[j + k]
            rows[j, i] = 1.0 / p
            if fabs(rows[j, i]) > m:
                m = fabs(rows[j, i])
        for i in range(d + 1):
            rows[j, i] /= m


def divided_difference_rows(x, int d):
    """Band coefficients of d-th order divided differences, max-normalized per row."""
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d < {n}, got {d}")
    out = np.empty((n - d, d + 1))
    if d == 0:
        out[:, 0] = 1.0
        return out
    _dd_rows(xa, d, out)
    return out


def annihilation_solve(x, int d, omega_hat, a0):
    """Minimum-variance correction of ``a0``; returns (coefficients, cond estimate)."""
    xa = np.ascontiguousarray(x, dtype=np.float64)
    om = np.ascontiguousarray(omega_hat, dtype=np.float64)
    a0a = np.ascontiguousarray(a0, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    if om.shape[0] != n or om.shape[1] != n or a0a.shape[0] != n:
        raise ValueError("dimension mismatch between grid, covariance and a0")
    if d == n:
        return a0a.copy(), 1.0
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d <= {n}, got {d}")

    cdef Py_ssize_t m = n - d
    rows_np = np.empty((m, d + 1))
    cdef double[:, ::1] rows = rows_np
    cdef const double[::1] xv = xa
    if d == 0:
        rows_np[:, 0] = 1.0
    else:
        _dd_rows(xv, d, rows)

    cdef const double[:, ::1] omv = om
    cdef const double[::1] a0v = a0a
    t_np = np.zeros((m, n))
    s_np = np.zeros((m, m))
    g_np = np.zeros(m)
    beta_np = np.zeros(m)
    a_np = a0a.copy()
    cdef double[:, ::1] T = t_np
    cdef double[:, ::1] S = s_np
    cdef double[::1] g = g_np
    cdef double[::1] beta = beta_np
    cdef double[::1] a = a_np

    cdef Py_ssize_t r, r2, c, i, k
    cdef double acc, piv, norm1, colsum

    # T = band(rows) @ omega_hat
    for r in range(m):
        for c in range(n):
            acc = 0.0
            for i in range(d + 1):
                acc += rows[r, i] * omv[r + i, c]
            T[r, c] = acc

    # S = T @ band(rows)^T, g = T @ a0 (S symmetric; fill lower half)
    for r in range(m):
        for r2 in range(r + 1):
            acc = 0.0
            for i in range(d + 1):
                acc += rows[r2, i] * T[r, r2 + i]
            S[r, r2] = acc
        acc = 0.0
        for c in range(n):
            acc += T[r, c] * a0v[c]
        g[r] = acc

    # 1-norm of S from the stored lower half, before it is overwritten
    norm1 = 0.0
    for c in range(m):
        colsum = 0.0
        for r in range(c, m):
            colsum += fabs(S[r, c])
        for r in range(c):
            colsum += fabs(S[c, r])
        if colsum > norm1:
            norm1 = colsum

    # in-place lower Cholesky of S
    for k in range(m):
        acc = S[k, k]
        for i in range(k):
            acc -= S[k, i] * S[k, i]
        if acc <= 0.0:
            raise np.linalg.LinAlgError("reduced system is not positive definite")
        piv = sqrt(acc)
        S[k, k] = piv
        for r in range(k + 1, m):
            acc = S[r, k]
            for i in range(k):
                acc -= S[r, i] * S[k, i]
            S[r, k] = acc / piv

    # solve L y = -g, then L^T beta = y (y stored in beta)
    for r in range(m):
        acc = -g[r]
        for i in range(r):
            acc -= S[r, i] * beta[i]
        beta[r] = acc / S[r, r]
    for r in range(m - 1, -1, -1):
        acc = beta[r]
        for i in range(r + 1, m):
            acc -= S[i, r] * beta[i]
        beta[r] = acc / S[r, r]

    # a = a0 + band(rows)^T @ beta
    for c in range(n):
        r = c - d if c - d > 0 else 0
        while r <= c and r < m:
            a[c] += rows[r, c - r] * beta[r]
            r += 1

    return a_np, _hager_estimate(S, norm1)
