"""Minimum-variance rule computation via three independent routes.

Every route minimizes the output noise variance a' omega_hat a over all
coefficient vectors reproducing polynomials of degree < d at the evaluation
point. The optimum is unique for SPD covariance, so the routes cross-check
each other:

* ``solve_annihilation`` (canonical): parametrize the feasible affine space
  with the banded annihilation operator and solve one SPD system of size
  N - d. Runs on the compiled kernel when available.
* ``solve_small_system``: exploit that the optimal rule is the covariance
  inverse applied to samples of a degree < d polynomial; find that
  polynomial from a d x d system.
* ``solve_orthopoly``: build covariance-orthonormal polynomials and
  evaluate their reproducing kernel at the evaluation point.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels, _pykernels, newton, orthopoly
from .annihilation import AnnihilationOperator, build_annihilator
from .core import (
    Approximant,
    NoiseCovariance,
    StencilSetting,
    make_approximant,
    reproduction_residual,
    variance_of,
)
from .errors import (
    DegreeOutOfRange,
    DimensionMismatch,
    IllConditionedWarning,
    RouteDisagreement,
    SingularSystem,
)

__all__ = [
    "Route",
    "SolveReport",
    "build_a0",
    "solve_annihilation",
    "solve_small_system",
    "solve_orthopoly",
    "solve_all_routes",
    "solve_given_annihilator",
    "kernel_check",
    "variance_lower_bound",
    "minimum_variance_coefficients",
]

# Condition estimate beyond which results are flagged (not rejected).
CONDITION_LIMIT = 1e14
# Routes must agree within this relative infinity-norm deviation.
CROSS_ROUTE_TOL = 1e-6


class Route(enum.Enum):
    ANNIHILATION_SOLVE = "annihilation_solve"
    SMALL_SYSTEM = "small_system"
    ORTHO_POLY = "ortho_poly"


@dataclass(frozen=True)
class SolveReport:
    """A solved rule plus the diagnostics that certify it."""

    approximant: Approximant
    route: Route
    reproduction_residual: float
    kernel_residual: float
    cross_route_deviation: float | None = None
    ill_conditioned: bool = False

    def __post_init__(self):
        for name in ("reproduction_residual", "kernel_residual"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise DimensionMismatch(f"{name} must be finite and nonnegative, got {v}")


def build_a0(
    setting: StencilSetting, cov: NoiseCovariance | None = None, strategy: str = "nearest"
) -> Approximant:
    """Some rule reproducing polynomials of degree < d, as a starting point.

    Lagrange interpolation weights on d grid nodes, zero elsewhere:
    ``nearest`` picks the d nodes closest to t0 (ties toward lower index),
    ``first`` simply takes the leading d nodes (useful for checking that the
    optimum does not depend on this choice). For d = 0 there is no
    constraint and the all-zero rule is returned by convention. The variance
    field is filled only when a covariance is supplied.
    """
    x = setting.grid.points
    d = setting.degree_d
    a = np.zeros(x.size)
    if d == 0:
        return Approximant(coefficients=a, setting=setting, variance=0.0)
    if strategy == "nearest":
        chosen = np.argsort(np.abs(x - setting.t0), kind="stable")[:d]
    elif strategy == "first":
        chosen = np.arange(d)
    else:
        raise ValueError(f"unknown a0 strategy {strategy!r}")
    nodes = x[chosen]
    for pos, i in enumerate(chosen):
        w = 1.0
        for k, xk in enumerate(nodes):
            if k != pos:
                w *= (setting.t0 - xk) / (nodes[pos] - xk)
        a[i] = w
    # interpolation weights on d nodes reproduce degree < d exactly
    if cov is not None:
        return make_approximant(a, setting, cov)
    return Approximant(coefficients=a, setting=setting, variance=None)


def minimum_variance_coefficients(
    setting: StencilSetting, cov: NoiseCovariance, a0: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """Bare coefficients plus condition estimate, without report packaging.

    This is the hot path used by the subdivision loops; it dispatches to the
    selected kernel backend.
    """
    _check_dims(setting, cov)
    d = setting.degree_d
    if d == 0:
        return np.zeros(setting.grid.n), 1.0
    if a0 is None:
        a0 = build_a0(setting).coefficients
    try:
        return _kernels.annihilation_solve(setting.grid.points, d, cov.omega_hat, a0)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"reduced SPD solve failed: {exc}") from exc


def solve_annihilation(
    setting: StencilSetting, cov: NoiseCovariance, a0: np.ndarray | None = None
) -> SolveReport:
    """Canonical route: one SPD solve of size N - d on the reduced system.

    For d = 0 the constraint set is all coefficient vectors and the optimal
    rule is identically zero (variance 0); that degenerate case is returned
    without solving.
    """
    a, cond = minimum_variance_coefficients(setting, cov, a0)
    return _report(a, setting, cov, Route.ANNIHILATION_SOLVE, cond)


def solve_given_annihilator(
    setting: StencilSetting,
    cov: NoiseCovariance,
    op: AnnihilationOperator,
    a0: np.ndarray | None = None,
) -> SolveReport:
    """Annihilation route with a caller-supplied operator matrix.

    The optimum is independent of which full-rank annihilator is used; this
    entry point exists so that independence can be exercised with operators
    other than the banded default (e.g. after an invertible row mixing).
    """
    _check_dims(setting, cov)
    d = setting.degree_d
    if op.degree_d != d or not np.array_equal(op.grid.points, setting.grid.points):
        raise DimensionMismatch("operator built for a different setting")
    if a0 is None:
        a0 = build_a0(setting).coefficients
    if d == 0:
        return _report(np.zeros(setting.grid.n), setting, cov, Route.ANNIHILATION_SOLVE, 1.0)
    nabla = op.matrix
    t = nabla @ cov.omega_hat
    s = t @ nabla.T
    s = 0.5 * (s + s.T)
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"reduced SPD solve failed: {exc}") from exc
    beta = np.linalg.solve(chol.T, np.linalg.solve(chol, -(t @ a0)))
    cond = _pykernels.spd_condition_estimate(chol, float(np.max(np.sum(np.abs(s), axis=0))))
    return _report(a0 + nabla.T @ beta, setting, cov, Route.ANNIHILATION_SOLVE, cond)


def solve_small_system(setting: StencilSetting, cov: NoiseCovariance) -> SolveReport:
    """Find the degree < d polynomial whose covariance-inverse samples reproduce.

    Assembles the d x d moment system column by column: each Newton basis
    polynomial is pushed through the covariance inverse and its moments are
    matched so that sum_i a_i x_i^s = t0^s for s < d. The moments are taken
    in centered powers (x - t0)^s with right-hand side (1, 0, ..., 0), an
    exactly equivalent triangular recombination of the raw-power rows that
    stays well conditioned on wide grids.
    """
    _check_dims(setting, cov)
    d = setting.degree_d
    if d < 1:
        raise DegreeOutOfRange("small-system route needs degree_d >= 1")
    x = setting.grid.points
    centers = newton.leja_centers(x, setting.t0, max(d - 1, 1))[: d - 1]
    basis_vals = newton.newton_basis_matrix(x, centers, d)
    w = cov.solve(basis_vals)  # column j = inv(omega_hat) @ B_j|_x
    powers = np.vander(x - setting.t0, d, increasing=True).T
    m = powers @ w
    rhs = np.zeros(d)
    rhs[0] = 1.0
    try:
        q = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"moment system singular: {exc}") from exc
    cond = float(np.linalg.cond(m))
    return _report(w @ q, setting, cov, Route.SMALL_SYSTEM, cond)


def solve_orthopoly(setting: StencilSetting, cov: NoiseCovariance) -> SolveReport:
    """Orthonormal-polynomial route via the reproducing kernel at t0."""
    _check_dims(setting, cov)
    if setting.degree_d < 1:
        raise DegreeOutOfRange("orthopoly route needs degree_d >= 1")
    basis = orthopoly.gram_schmidt(setting, cov)
    q = orthopoly.build_Q(basis, setting.t0)
    a = cov.solve(q.values)
    return _report(a, setting, cov, Route.ORTHO_POLY, 1.0, flag=basis.gram_residual > 1e-6)


def solve_all_routes(setting: StencilSetting, cov: NoiseCovariance) -> SolveReport:
    """Run all three routes, cross-check, and return the canonical result.

    Raises :class:`RouteDisagreement` when the maximum pairwise coefficient
    deviation exceeds 1e-6 times the coefficient magnitude; that indicates a
    bug or conditioning beyond what the tolerances were chosen for.
    """
    if setting.degree_d < 1:
        raise DegreeOutOfRange("route comparison needs degree_d >= 1")
    main = solve_annihilation(setting, cov)
    others = [solve_small_system(setting, cov), solve_orthopoly(setting, cov)]
    coeffs = [main.approximant.coefficients] + [r.approximant.coefficients for r in others]
    deviation = 0.0
    for i in range(len(coeffs)):
        for j in range(i + 1, len(coeffs)):
            deviation = max(deviation, float(np.max(np.abs(coeffs[i] - coeffs[j]))))
    scale = float(np.max(np.abs(main.approximant.coefficients)))
    if deviation > CROSS_ROUTE_TOL * scale:
        raise RouteDisagreement(
            f"routes deviate by {deviation:.3e} (> {CROSS_ROUTE_TOL:.0e} * {scale:.3e})"
        )
    return SolveReport(
        approximant=main.approximant,
        route=main.route,
        reproduction_residual=main.reproduction_residual,
        kernel_residual=main.kernel_residual,
        cross_route_deviation=deviation,
        ill_conditioned=main.ill_conditioned,
    )


def kernel_check(a, cov: NoiseCovariance, op: AnnihilationOperator) -> float:
    """Optimality certificate: how far omega_hat @ a is from the operator kernel.

    Near zero exactly when ``a`` is the minimum-variance rule (the image of
    the optimum under the covariance is a polynomial sample).
    """
    coeffs = a.coefficients if isinstance(a, Approximant) else np.asarray(a, dtype=float)
    if coeffs.size != cov.dim or op.matrix.shape[1] != cov.dim:
        raise DimensionMismatch("coefficient/covariance/operator dimensions disagree")
    image = cov.omega_hat @ coeffs
    return float(np.max(np.abs(op.matrix @ image)) / max(1.0, np.max(np.abs(image))))


def variance_lower_bound(cov: NoiseCovariance) -> float:
    """Smallest achievable output variance among all mean-preserving rules.

    Equals 1 / (1' inv(omega_hat) 1) and is attained by the d = 1
    minimum-variance rule; no rule reproducing constants can do better.
    """
    ones = np.ones(cov.dim)
    return float(1.0 / (ones @ cov.solve(ones)))


def _check_dims(setting: StencilSetting, cov: NoiseCovariance):
    if cov.dim != setting.grid.n:
        raise DimensionMismatch(f"covariance dim {cov.dim} vs grid size {setting.grid.n}")


def _report(
    a: np.ndarray,
    setting: StencilSetting,
    cov: NoiseCovariance,
    route: Route,
    cond: float,
    flag: bool = False,
) -> SolveReport:
    ill = flag or cond > CONDITION_LIMIT
    if ill:
        warnings.warn(
            f"{route.value}: condition estimate {cond:.2e} beyond trust threshold",
            IllConditionedWarning,
        )
    approx = make_approximant(a, setting, cov)
    d = setting.degree_d
    if 0 < d < setting.grid.n:
        op = build_annihilator(setting.grid, d)
        kres = kernel_check(approx, cov, op)
    else:
        kres = 0.0  # no active constraint direction: certificate is vacuous
    return SolveReport(
        approximant=approx,
        route=route,
        reproduction_residual=reproduction_residual(approx.coefficients, setting),
        kernel_residual=kres,
        ill_conditioned=ill,
    )
