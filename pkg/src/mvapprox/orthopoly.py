"""Polynomials orthonormal under the covariance-weighted discrete inner product.

The inner product of two polynomials is (P, Q) = P|_x' inv(omega_hat) Q|_x,
evaluated through the stored triangular factor (never an explicit inverse).
Orthonormalizing the Newton basis degree by degree gives the backbone of the
orthogonal-projection solution route: the optimal rule is the covariance
inverse applied to the reproducing-kernel polynomial of the basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import newton
from .core import NoiseCovariance, PolySample, StencilSetting, sample_polynomial
from .errors import DimensionMismatch, GramSchmidtBreakdown

__all__ = ["OrthonormalPolyBasis", "inner_product", "gram_schmidt", "build_Q"]

# Orthonormality defect tolerance for a healthy basis.
ORTHO_TOL = 1e-10
# Gram-Schmidt pivot collapse threshold, relative to the vector's initial norm.
BREAKDOWN_TOL = 1e-13


@dataclass(frozen=True)
class OrthonormalPolyBasis:
    """Orthonormal polynomials P_0..P_{d-1} with deg P_s = s exactly.

    ``gram_residual`` records max |(P_i, P_j) - delta_ij| measured directly
    on the stored samples, as a self-diagnostic of orthogonalization quality.
    """

    degree_count: int
    polys: tuple[PolySample, ...]
    gram_residual: float

    def __post_init__(self):
        if len(self.polys) != self.degree_count:
            raise DimensionMismatch("poly count does not match degree_count")


def inner_product(p: PolySample, q: PolySample, cov: NoiseCovariance) -> float:
    """Covariance-weighted inner product of two sampled polynomials."""
    if not np.array_equal(p.grid.points, q.grid.points):
        raise DimensionMismatch("polynomials sampled on different grids")
    if p.values.size != cov.dim:
        raise DimensionMismatch(f"{p.values.size} samples vs covariance dim {cov.dim}")
    return float(p.values @ cov.solve(q.values))


def gram_schmidt(setting: StencilSetting, cov: NoiseCovariance) -> OrthonormalPolyBasis:
    """Orthonormalize the Newton basis up to degree ``setting.degree_d - 1``.

    Modified Gram-Schmidt with one unconditional re-orthogonalization pass
    ("twice is enough"), tracking value vectors, their covariance-inverse
    images and Newton coefficients through identical updates. The leading
    Newton coefficient of each result is kept positive, which pins the
    otherwise sign-ambiguous basis.
    """
    d = setting.degree_d
    grid = setting.grid
    if d < 1:
        raise DimensionMismatch("orthonormal basis needs degree_d >= 1")
    if cov.dim != grid.n:
        raise DimensionMismatch(f"covariance dim {cov.dim} vs grid size {grid.n}")
    centers = newton.leja_centers(grid.points, setting.t0, max(d - 1, 1))[: max(d - 1, 0)]
    V = newton.newton_basis_matrix(grid.points, centers, d)
    W = cov.solve(V)  # inv(omega_hat) applied to every basis column

    vals = [V[:, j].copy() for j in range(d)]
    wvals = [W[:, j].copy() for j in range(d)]
    coeffs = [np.zeros(j + 1) for j in range(d)]
    for j in range(d):
        coeffs[j][j] = 1.0

    for j in range(d):
        v, w, c = vals[j], wvals[j], coeffs[j]
        norm0 = np.sqrt(max(float(v @ w), 0.0))
        for _ in range(2):  # MGS pass plus one re-orthogonalization
            for i in range(j):
                proj = float(vals[i] @ w)
                v -= proj * vals[i]
                w -= proj * wvals[i]
                c[: i + 1] -= proj * coeffs[i]
        norm = np.sqrt(max(float(v @ w), 0.0))
        if not np.isfinite(norm) or norm <= 0.0 or norm < BREAKDOWN_TOL * norm0:
            raise GramSchmidtBreakdown(
                f"degree-{j} pivot collapsed: {norm:.3e} < {BREAKDOWN_TOL:.0e} * {norm0:.3e}"
            )
        v /= norm
        w /= norm
        c /= norm
        if c[j] < 0:  # sign convention: positive leading coefficient
            v *= -1.0
            w *= -1.0
            c *= -1.0

    polys = tuple(sample_polynomial(coeffs[j], centers, grid) for j in range(d))
    gram = np.array([[inner_product(p, q, cov) for q in polys] for p in polys])
    residual = float(np.max(np.abs(gram - np.eye(d))))
    return OrthonormalPolyBasis(degree_count=d, polys=polys, gram_residual=residual)


def build_Q(basis: OrthonormalPolyBasis, t0: float) -> PolySample:
    """Reproducing-kernel polynomial: sum of P_j(t0) P_j over the basis."""
    polys = basis.polys
    d = basis.degree_count
    coeffs = np.zeros(d)
    for p in polys:
        weight = float(p(t0))
        coeffs[: p.coeffs.size] += weight * p.coeffs
    anchor = polys[-1]
    return sample_polynomial(coeffs, anchor.centers, anchor.grid)
