"""Typed errors raised by the library."""


class IlsError(Exception):
    """Base class for all library errors."""


class NotSpdError(IlsError):
    """A matrix required to be symmetric positive definite is not."""


class RankDeficientError(IlsError):
    """A matrix required to have full rank is (numerically) rank deficient."""


class EigenConvergenceError(IlsError):
    """The symmetric eigensolver failed to converge."""


class ProblemValidationError(IlsError):
    """Problem data violates a structural requirement (shapes, rank, SPD)."""


class GenerationError(IlsError):
    """A problem generator could not produce a valid instance."""


class MtxFormatError(IlsError):
    """A Matrix Market file is malformed or uses an unsupported variant."""


class BreakdownError(IlsError):
    """GMRES hit an Arnoldi breakdown without reaching the residual target."""
