"""Exception types shared across the package."""


class HillBasisError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HillBasisError):
    """Malformed or empty input data."""


class TruncationRiskError(HillBasisError):
    """Requested resolution is not supported by the available samples."""


class PreconditionError(HillBasisError):
    """An operation's documented precondition was violated."""


class NumericalFailureError(HillBasisError):
    """An iterative numerical procedure failed to converge.

    Carries whatever partial result is available in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PairingAmbiguityError(HillBasisError):
    """An eigenvalue-localization disk captured a number of eigenvalues != 2."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class JordanSolveError(HillBasisError):
    """The associated-function solve left a residual above tolerance."""


class ResonanceError(HillBasisError):
    """A series denominator fell below the resonance guard threshold."""


class IntegrationOverflowError(HillBasisError):
    """The ODE integration produced a nonfinite state."""


class RootIsolationError(HillBasisError):
    """Root search could not isolate exactly two roots in the target disk."""
