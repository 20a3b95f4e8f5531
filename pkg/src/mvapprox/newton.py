"""Newton polynomial basis utilities.

Polynomial coefficients throughout the package refer to the Newton basis

    B_0(x) = 1,   B_j(x) = (x - c_0)(x - c_1)...(x - c_{j-1}),

whose centers ``c_m`` start at the evaluation point and continue with grid
nodes in Leja (greedily farthest) order. Monomials on wide grids with powers
up to N are too ill-conditioned to serve as a working basis; the Newton
products stay well scaled. Conversion helpers to and from monomial
coefficients are provided for interoperability.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "leja_centers",
    "newton_eval",
    "newton_basis_matrix",
    "newton_to_monomial",
    "monomial_to_newton",
]


def leja_centers(points: np.ndarray, t0: float, count: int) -> np.ndarray:
    """Pick ``count`` Newton centers: ``t0`` first, then Leja-ordered nodes.

    Each subsequent center is the grid node maximizing the product of
    distances to the centers chosen so far (ties break toward the lower
    index, which keeps the ordering deterministic).
    """
    if count <= 0:
        return np.empty(0)
    points = np.asarray(points, dtype=float)
    centers = np.empty(count)
    centers[0] = t0
    score = np.abs(points - t0)
    for m in range(1, count):
        pick = int(np.argmax(score))  # argmax takes the first maximum
        centers[m] = points[pick]
        score *= np.abs(points - points[pick])
    return centers


def newton_eval(coeffs: np.ndarray, centers: np.ndarray, x: np.ndarray | float):
    """Evaluate a Newton-form polynomial with nested multiplication.

    ``coeffs`` has one entry per basis function; ``centers`` must hold at
    least ``len(coeffs) - 1`` values.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    acc = np.full_like(np.asarray(x, dtype=float), coeffs[-1])
    for j in range(coeffs.size - 2, -1, -1):
        acc = acc * (x - centers[j]) + coeffs[j]
    return acc


def newton_basis_matrix(x: np.ndarray, centers: np.ndarray, ncols: int) -> np.ndarray:
    """Values of the first ``ncols`` Newton basis polynomials at ``x``.

    Column ``j`` holds B_j(x); computed by the running product, O(N * ncols).
    """
    x = np.asarray(x, dtype=float)
    V = np.empty((x.size, ncols))
    V[:, 0] = 1.0
    for j in range(1, ncols):
        V[:, j] = V[:, j - 1] * (x - centers[j - 1])
    return V


def newton_to_monomial(coeffs: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Expand Newton coefficients into monomial coefficients (low degree first)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        return np.zeros(1)
    # Horner on coefficient arrays: acc <- acc*(x - c_j) + q_j.
    acc = np.array([coeffs[-1]])
    for j in range(coeffs.size - 2, -1, -1):
        nxt = np.zeros(acc.size + 1)
        nxt[1:] += acc
        nxt[:-1] -= centers[j] * acc
        nxt[0] += coeffs[j]
        acc = nxt
    return acc


def monomial_to_newton(mono: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Rewrite monomial coefficients (low degree first) in the Newton basis.

    Repeated synthetic division by (x - c_j): the remainder of step j is the
    Newton coefficient q_j.
    """
    work = np.asarray(mono, dtype=float).copy()
    n = work.size
    q = np.zeros(n)
    for j in range(n - 1):
        c = centers[j]
        # divide work by (x - c); remainder -> q[j], quotient continues
        for k in range(n - 2 - j, -1, -1):
            work[k] += c * work[k + 1]
        q[j] = work[0]
        work = work[1:]
    q[n - 1] = work[0]
    return q
