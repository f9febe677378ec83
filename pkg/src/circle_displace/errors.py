"""Exception hierarchy with stable machine-readable error codes."""


class CircleDisplaceError(Exception):
    """Base class for all package errors. ``code`` is stable across releases."""

    code = "error"


class InvalidMapError(CircleDisplaceError):
    """Construction-time validation failure (monotonicity, degree one, params)."""

    code = "invalid_map"


class InverseError(CircleDisplaceError):
    """Inverse solve could not bracket a root; the lift is corrupted."""

    code = "inverse_failure"


class ClassificationError(CircleDisplaceError):
    """An operation required the other rational/irrational branch."""

    code = "classification"


class SingularMeasureError(CircleDisplaceError):
    """The displacement distribution is singular; no density exists."""

    code = "singular_measure"


class NonFiringError(CircleDisplaceError):
    """Threshold is never reached within the horizon; firing map undefined."""

    code = "non_firing"


class ConvergenceError(CircleDisplaceError):
    """An iteration cap was hit (e.g. near-parabolic periodic points)."""

    code = "non_convergence"


class VerificationError(CircleDisplaceError):
    """A property that must hold for every point failed; implementation bug."""

    code = "verification_failed"
