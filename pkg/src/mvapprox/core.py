"""Core domain types: grids, stencil settings, noise covariances, approximants.

All types here are immutable after construction (arrays are marked
read-only), so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import newton
from .errors import (
    DegreeOutOfRange,
    DimensionMismatch,
    ExtrapolationNotAllowed,
    InvariantViolation,
    NonMonotoneGrid,
    NotPositiveDefinite,
    NotSymmetric,
)

__all__ = [
    "Grid",
    "StencilSetting",
    "NoiseCovariance",
    "Approximant",
    "PolySample",
    "make_setting",
    "make_covariance",
    "make_approximant",
    "sample_polynomial",
    "variance_of",
    "reproduction_residual",
    "PIVOT_TOL",
    "REPRODUCTION_TOL",
    "SYMMETRY_TOL",
]

# SPD acceptance: smallest Cholesky pivot relative to max diagonal entry.
PIVOT_TOL = 1e-12
# Reproduction check, relative to max(1, |t0|^s, max|x_i|^s) per moment s.
REPRODUCTION_TOL = 1e-9
# Max allowed asymmetry relative to the largest matrix entry.
SYMMETRY_TOL = 1e-12

_CONSISTENCY_RTOL = 1e-12


def _frozen(a: np.ndarray, dtype=float, ndim: int | None = None) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    if ndim is not None and out.ndim != ndim:
        raise DimensionMismatch(f"expected {ndim}-d array, got {out.ndim}-d")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample abscissae."""

    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points, ndim=1)
        if pts.size < 1:
            raise NonMonotoneGrid("grid needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise NonMonotoneGrid("grid points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise NonMonotoneGrid("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])


@dataclass(frozen=True)
class StencilSetting:
    """A grid, an evaluation point and a reproduction degree.

    ``degree_d`` is the number of enforced moment conditions: the resulting
    rules reproduce all polynomials of degree < degree_d. degree_d = 0 means
    no constraint, degree_d = n forces the unique interpolant.
    """

    grid: Grid
    t0: float
    degree_d: int
    extrapolation: bool = False

    def __post_init__(self):
        if not isinstance(self.grid, Grid):
            object.__setattr__(self, "grid", Grid(self.grid))
        d = int(self.degree_d)
        if not 0 <= d <= self.grid.n:
            raise DegreeOutOfRange(f"degree_d={d} outside [0, {self.grid.n}]")
        object.__setattr__(self, "degree_d", d)
        object.__setattr__(self, "t0", float(self.t0))
        lo, hi = self.grid.span
        if not self.extrapolation and not lo <= self.t0 <= hi:
            raise ExtrapolationNotAllowed(
                f"t0={self.t0} outside [{lo}, {hi}]; pass allow_extrapolation to permit"
            )


def make_setting(grid, t0: float, d: int, allow_extrapolation: bool = False) -> StencilSetting:
    """Validate and build a :class:`StencilSetting`."""
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    return StencilSetting(grid=grid, t0=t0, degree_d=d, extrapolation=allow_extrapolation)


@dataclass(frozen=True)
class NoiseCovariance:
    """SPD noise covariance with its upper-triangular Cholesky-style factor.

    ``omega_hat = omega_factor.T @ omega_factor`` holds to relative 1e-12,
    so the output standard deviation of a rule ``a`` is ``||omega_factor @ a||``.
    Construct through :func:`make_covariance`, which performs the symmetry
    and positive-definiteness checks.
    """

    omega_hat: np.ndarray
    omega_factor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega_hat", _frozen(self.omega_hat, ndim=2))
        object.__setattr__(self, "omega_factor", _frozen(self.omega_factor, ndim=2))

    @property
    def dim(self) -> int:
        return self.omega_hat.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Apply the covariance inverse via two triangular solves.

        Never forms the explicit inverse; accepts vector or matrix rhs.
        """
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.dim:
            raise DimensionMismatch(f"rhs has leading dim {rhs.shape[0]}, expected {self.dim}")
        y = solve_triangular(self.omega_factor, rhs, trans="T", lower=False)
        return solve_triangular(self.omega_factor, y, trans="N", lower=False)


def make_covariance(matrix) -> NoiseCovariance:
    """Validate an SPD matrix and compute its upper-triangular factor.

    Raises
    ------
    NotSymmetric
        If the max asymmetry exceeds 1e-12 times the largest entry.
    NotPositiveDefinite
        If Cholesky fails or any pivot falls below 1e-12 of the max diagonal.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotPositiveDefinite("covariance entries must be finite")
    scale = np.max(np.abs(m)) if m.size else 0.0
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > SYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(f"max asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e} * max entry")
    m = 0.5 * (m + m.T)  # wipe sub-tolerance asymmetry so the stored matrix is exact
    try:
        lower = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {exc}") from exc
    pivots = np.diag(lower) ** 2
    threshold = PIVOT_TOL * np.max(np.diag(m))
    if np.min(pivots) <= threshold:
        raise NotPositiveDefinite(
            f"smallest pivot {np.min(pivots):.3e} at or below {threshold:.3e}"
        )
    return NoiseCovariance(omega_hat=m, omega_factor=lower.T)


def variance_of(a: np.ndarray, cov: NoiseCovariance) -> float:
    """Output noise variance of the rule ``a``: the quadratic form a' omega_hat a.

    Evaluated as the squared norm of ``omega_factor @ a``, which is
    nonnegative by construction.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (cov.dim,):
        raise DimensionMismatch(f"coefficients have shape {a.shape}, expected ({cov.dim},)")
    return float(np.sum((cov.omega_factor @ a) ** 2))


def reproduction_residual(a: np.ndarray, setting: StencilSetting) -> float:
    """Worst scaled violation of the moment conditions sum_i a_i x_i^s = t0^s.

    Each moment s < degree_d is scaled by max(1, |t0|^s, max|x_i|^s) before
    taking the maximum, so wide grids do not inflate the residual.
    """
    a = np.asarray(a, dtype=float)
    x = setting.grid.points
    if a.shape != x.shape:
        raise DimensionMismatch(f"coefficients have shape {a.shape}, expected {x.shape}")
    worst = 0.0
    xs = np.ones_like(x)
    for s in range(setting.degree_d):
        if s > 0:
            xs = xs * x
        scale = max(1.0, abs(setting.t0) ** s, float(np.max(np.abs(x))) ** s)
        worst = max(worst, abs(float(a @ xs) - setting.t0**s) / scale)
    return worst


@dataclass(frozen=True)
class Approximant:
    """Coefficients of a linear rule together with its setting and variance.

    ``variance`` is the output noise variance under the covariance the rule
    was built for; it is ``None`` for rules constructed without a covariance
    (feasible starting points).
    """

    coefficients: np.ndarray
    setting: StencilSetting
    variance: float | None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _frozen(self.coefficients, ndim=1))
        if self.variance is not None:
            object.__setattr__(self, "variance", float(self.variance))
        if self.coefficients.size != self.setting.grid.n:
            raise DimensionMismatch(
                f"{self.coefficients.size} coefficients for a {self.setting.grid.n}-point grid"
            )

    def __call__(self, samples: np.ndarray):
        """Apply the rule to a sample vector (or stacked sample columns)."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape[0] != self.coefficients.size:
            raise DimensionMismatch(
                f"samples have leading dim {samples.shape[0]}, expected {self.coefficients.size}"
            )
        return self.coefficients @ samples


def make_approximant(coefficients, setting: StencilSetting, cov: NoiseCovariance) -> Approximant:
    """Build an :class:`Approximant`, checking reproduction and recomputing variance."""
    a = np.asarray(coefficients, dtype=float)
    resid = reproduction_residual(a, setting)
    if resid > REPRODUCTION_TOL:
        raise InvariantViolation(
            f"coefficients violate reproduction: residual {resid:.3e} > {REPRODUCTION_TOL:.0e}"
        )
    return Approximant(coefficients=a, setting=setting, variance=variance_of(a, cov))


@dataclass(frozen=True)
class PolySample:
    """A polynomial sampled on a grid, with its Newton-form coefficients.

    ``coeffs[j]`` weights the Newton basis polynomial with centers
    ``centers[:j]``; ``values`` holds the polynomial evaluated at the grid
    points and is checked against the coefficients at construction.
    """

    values: np.ndarray
    coeffs: np.ndarray
    centers: np.ndarray
    grid: Grid = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, ndim=1))
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, ndim=1))
        object.__setattr__(self, "centers", _frozen(self.centers, ndim=1))
        if self.values.size != self.grid.n:
            raise DimensionMismatch(
                f"{self.values.size} values for a {self.grid.n}-point grid"
            )
        if self.centers.size < max(self.coeffs.size - 1, 0):
            raise DimensionMismatch("not enough Newton centers for the coefficients")
        recon = newton.newton_eval(self.coeffs, self.centers, self.grid.points)
        scale = max(float(np.max(np.abs(self.values))), 1.0)
        if np.max(np.abs(recon - self.values)) > _CONSISTENCY_RTOL * scale:
            raise InvariantViolation("values inconsistent with Newton coefficients")

    def __call__(self, x):
        """Evaluate the polynomial at arbitrary points."""
        return newton.newton_eval(self.coeffs, self.centers, x)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0


def sample_polynomial(coeffs, centers, grid: Grid) -> PolySample:
    """Evaluate Newton-form coefficients on ``grid`` and package the result."""
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    coeffs = np.asarray(coeffs, dtype=float)
    centers = np.asarray(centers, dtype=float)
    values = newton.newton_eval(coeffs, centers, grid.points)
    return PolySample(values=values, coeffs=coeffs, centers=centers, grid=grid)
