"""Pure-Python (numpy) implementations of the hot per-stencil kernels.

Same contract as the compiled module ``mvapprox._ckernels``; selected as a
fallback by ``mvapprox._kernels`` when the extension is unavailable or when
``MVAPPROX_BACKEND=python`` is set. Both backends must agree to rounding on
identical inputs (covered by the cross-backend tests).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def divided_difference_rows(x: np.ndarray, d: int) -> np.ndarray:
    """Band coefficients of d-th order divided differences on sliding windows.

    Row j holds the weights of the divided difference over x[j..j+d],
    rescaled so its largest magnitude is 1. Returns an (N-d, d+1) array;
    for d = 0 this is a column of ones.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d < {n}, got {d}")
    if d == 0:
        return np.ones((n, 1))
    # windows[j, i] = x[j + i]; pairwise differences give the weight products
    windows = np.lib.stride_tricks.sliding_window_view(x, d + 1)
    diff = windows[:, :, None] - windows[:, None, :]
    np.einsum("jii->ji", diff)[...] = 1.0  # neutralize the i == k terms
    rows = 1.0 / np.prod(diff, axis=2)
    rows /= np.max(np.abs(rows), axis=1, keepdims=True)
    return rows


def spd_condition_estimate(chol: np.ndarray, norm1: float) -> float:
    """Hager-style 1-norm condition estimate of an SPD matrix from its factor.

    ``chol`` is the lower Cholesky factor, ``norm1`` the 1-norm of the
    matrix itself. At most five probe solves; the same iteration runs in the
    compiled backend so both report comparable numbers.
    """
    m = chol.shape[0]
    if m == 0:
        return 1.0

    def inv_apply(v):
        return np.linalg.solve(chol.T, np.linalg.solve(chol, v))

    x = np.full(m, 1.0 / m)
    estimate = 0.0
    for iteration in range(5):
        y = inv_apply(x)
        new_estimate = float(np.sum(np.abs(y)))
        xi = np.where(y >= 0, 1.0, -1.0)
        z = inv_apply(xi)  # matrix is symmetric, no transpose branch needed
        j = int(np.argmax(np.abs(z)))
        if iteration > 0 and (new_estimate <= estimate or np.abs(z[j]) <= z @ x):
            estimate = max(estimate, new_estimate)
            break
        estimate = new_estimate
        x = np.zeros(m)
        x[j] = 1.0
    return float(norm1 * estimate)


def annihilation_solve(
    x: np.ndarray, d: int, omega_hat: np.ndarray, a0: np.ndarray
) -> tuple[np.ndarray, float]:
    """Minimum-variance correction of a feasible rule ``a0``.

    Projects a0 onto the optimum within the affine space a0 + rows(d)^T beta
    by solving the (N-d) x (N-d) SPD system built from the divided-difference
    band and the covariance. Returns the corrected coefficients plus a
    1-norm condition estimate of that system.

    Raises ``np.linalg.LinAlgError`` if the reduced system is numerically
    singular; callers translate this to a package error.
    """
    x = np.asarray(x, dtype=float)
    omega_hat = np.asarray(omega_hat, dtype=float)
    a0 = np.asarray(a0, dtype=float)
    n = x.size
    if d == n:
        return a0.copy(), 1.0
    rows = divided_difference_rows(x, d)
    nabla = np.zeros((n - d, n))
    for j in range(n - d):
        nabla[j, j : j + d + 1] = rows[j]
    t = nabla @ omega_hat
    s = t @ nabla.T
    s = 0.5 * (s + s.T)  # keep the Cholesky input exactly symmetric
    chol = np.linalg.cholesky(s)
    g = t @ a0
    y = np.linalg.solve(chol, -g)
    beta = np.linalg.solve(chol.T, y)
    cond = spd_condition_estimate(chol, float(np.max(np.sum(np.abs(s), axis=0))))
    return a0 + nabla.T @ beta, cond
