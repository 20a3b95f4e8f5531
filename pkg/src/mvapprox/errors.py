"""Exception hierarchy for mvapprox.

Every error raised by the library derives from :class:`MvapproxError`, so
callers can catch one type at the boundary (the CLI maps it to exit code 1).
"""


class MvapproxError(Exception):
    """Base class for all mvapprox errors."""


class NonMonotoneGrid(MvapproxError):
    """Grid abscissae are not strictly increasing."""


class DegreeOutOfRange(MvapproxError):
    """Reproduction degree incompatible with the grid size."""


class ExtrapolationNotAllowed(MvapproxError):
    """Evaluation point outside the grid span without the extrapolation flag."""


class NotSymmetric(MvapproxError):
    """Covariance input is asymmetric beyond tolerance."""


class NotPositiveDefinite(MvapproxError):
    """Covariance input failed the Cholesky pivot test."""


class DimensionMismatch(MvapproxError):
    """Vector/matrix dimensions do not agree."""


class SingularSystem(MvapproxError):
    """A linear system that should be regular could not be solved."""


class GramSchmidtBreakdown(MvapproxError):
    """Orthogonalization pivot collapsed to numerical zero."""


class RouteDisagreement(MvapproxError):
    """Independent solution routes produced incompatible coefficients."""


class StencilTooWide(MvapproxError):
    """Periodic sequence shorter than the stencil width."""


class BlockMismatch(MvapproxError):
    """Covariance block size does not divide the sequence period."""


class EpsilonOutOfRange(MvapproxError):
    """Experiment parameter epsilon outside its admissible interval."""


class InvariantViolation(MvapproxError):
    """A constructed object failed one of its own consistency checks."""


class IllConditionedWarning(UserWarning):
    """Linear system condition estimate beyond the trust threshold.

    Results are still returned (and flagged on the report); this warning
    signals that coefficients may carry fewer correct digits than usual.
    """
