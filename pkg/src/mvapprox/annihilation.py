"""Annihilation operators: banded maps whose kernel is a sampled polynomial space.

The operator for degree parameter d sends samples of any polynomial of
degree < d on the grid to zero. Rows are d-th order divided differences
over sliding windows of d+1 consecutive nodes, each rescaled so its largest
entry is 1; divided-difference weights can span many orders of magnitude on
stretched grids and the rescaling keeps downstream products well scaled
without changing the kernel or the row space. Any full-rank matrix with the
same kernel yields the same minimum-variance rule, so the banded choice is
purely about conditioning and O(N d^2) construction cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Grid, PolySample, _frozen
from .errors import DegreeOutOfRange, DimensionMismatch

__all__ = ["AnnihilationOperator", "build_annihilator", "kernel_residual"]

# Relative threshold below which an image vector counts as annihilated.
KERNEL_TOL = 1e-10


@dataclass(frozen=True)
class AnnihilationOperator:
    """(N-d) x N full-rank matrix annihilating polynomials of degree < d."""

    matrix: np.ndarray
    grid: Grid
    degree_d: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix, ndim=2))
        n = self.grid.n
        if self.matrix.shape != (n - self.degree_d, n):
            raise DimensionMismatch(
                f"operator shape {self.matrix.shape}, expected {(n - self.degree_d, n)}"
            )

    def __matmul__(self, vec):
        return self.matrix @ vec


def build_annihilator(grid: Grid, d: int) -> AnnihilationOperator:
    """Banded annihilation operator for polynomials of degree < d on ``grid``.

    For d = 0 the kernel is {0} and the operator is the identity. Row j
    carries the d-th divided difference over nodes j..j+d, so rows are
    linearly independent by the band structure.
    """
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    n = grid.n
    if not 0 <= d < n:
        raise DegreeOutOfRange(f"annihilator needs 0 <= d < {n}, got {d}")
    if d == 0:
        return AnnihilationOperator(matrix=np.eye(n), grid=grid, degree_d=0)
    rows = _kernels.divided_difference_rows(grid.points, d)
    matrix = np.zeros((n - d, n))
    for j in range(n - d):
        matrix[j, j : j + d + 1] = rows[j]
    return AnnihilationOperator(matrix=matrix, grid=grid, degree_d=d)


def kernel_residual(op: AnnihilationOperator, p: PolySample) -> float:
    """How far a sampled polynomial is from the operator's kernel.

    Returns ||op @ values||_inf / max(1, ||values||_inf); at or below
    ``KERNEL_TOL`` the sample is annihilated (degree < d up to rounding).
    """
    if not np.array_equal(p.grid.points, op.grid.points):
        raise DimensionMismatch("polynomial sampled on a different grid than the operator")
    image = op.matrix @ p.values
    return float(np.max(np.abs(image)) / max(1.0, np.max(np.abs(p.values))))
