"""Minimum-variance linear approximants for correlated noisy samples.

Given samples on a grid, a target evaluation point and the noise covariance,
the library computes the coefficient vector that reproduces polynomials up
to a prescribed degree exactly while minimizing the output noise variance.
Three independent solution routes cross-check each other, and the rules
drive binary subdivision refinement and periodic smoothing.

The per-stencil solve kernels run compiled (Cython) when the extension is
available and fall back to numpy otherwise; ``mvapprox.KERNEL_BACKEND``
names the active implementation.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from ._kernels import available_backends
from .annihilation import AnnihilationOperator, build_annihilator, kernel_residual
from .core import (
    Approximant,
    Grid,
    NoiseCovariance,
    PolySample,
    StencilSetting,
    make_approximant,
    make_covariance,
    make_setting,
    reproduction_residual,
    sample_polynomial,
    variance_of,
)
from .errors import (
    BlockMismatch,
    DegreeOutOfRange,
    DimensionMismatch,
    EpsilonOutOfRange,
    ExtrapolationNotAllowed,
    GramSchmidtBreakdown,
    IllConditionedWarning,
    InvariantViolation,
    MvapproxError,
    NonMonotoneGrid,
    NotPositiveDefinite,
    NotSymmetric,
    RouteDisagreement,
    SingularSystem,
    StencilTooWide,
)
from .orthopoly import OrthonormalPolyBasis, build_Q, gram_schmidt, inner_product
from .solver import (
    Route,
    SolveReport,
    build_a0,
    kernel_check,
    minimum_variance_coefficients,
    solve_all_routes,
    solve_annihilation,
    solve_given_annihilator,
    solve_orthopoly,
    solve_small_system,
    variance_lower_bound,
)
from .subdivision import (
    PeriodicSequence,
    SchemeConfig,
    dyadic_grid,
    refine_once,
    smooth_in_place,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "available_backends",
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
    "AnnihilationOperator",
    "build_annihilator",
    "kernel_residual",
    "OrthonormalPolyBasis",
    "inner_product",
    "gram_schmidt",
    "build_Q",
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
    "SchemeConfig",
    "PeriodicSequence",
    "dyadic_grid",
    "refine_once",
    "smooth_in_place",
    "MvapproxError",
    "NonMonotoneGrid",
    "DegreeOutOfRange",
    "ExtrapolationNotAllowed",
    "NotSymmetric",
    "NotPositiveDefinite",
    "DimensionMismatch",
    "SingularSystem",
    "GramSchmidtBreakdown",
    "RouteDisagreement",
    "StencilTooWide",
    "BlockMismatch",
    "EpsilonOutOfRange",
    "InvariantViolation",
    "IllConditionedWarning",
]
