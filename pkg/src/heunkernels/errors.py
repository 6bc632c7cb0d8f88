"""Exception types raised by the evaluation and verification layers."""

from __future__ import annotations


class HeunKernelError(Exception):
    """Base class for every error raised by this package."""


class NumericOverflow(HeunKernelError):
    pass


class SingularPower(HeunKernelError):
    pass


class BranchCut(HeunKernelError):
    pass


class DivisionByZero(HeunKernelError):
    pass


class OutsideDomain(HeunKernelError):
    pass


class NoConvergence(HeunKernelError):
    pass


class DegenerateParameter(HeunKernelError):
    pass


class IntegerParameterDegeneracy(DegenerateParameter):
    pass


class EvaluationAtSingularity(HeunKernelError):
    pass


class LogarithmicCase(HeunKernelError):
    pass


class NoConvergenceEstimate(HeunKernelError):
    pass


class FitInconsistent(HeunKernelError):
    pass


class ClosureOverflow(HeunKernelError):
    pass


class ClosureDeficit(HeunKernelError):
    pass


class OutsideValidity(HeunKernelError):
    pass


class AllPointsInfeasible(HeunKernelError):
    pass


class NoMatchedRegion(HeunKernelError):
    pass


# Errors that only mean "this point is not usable"; samplers reject on these.
DOMAIN_ERRORS = (
    SingularPower,
    BranchCut,
    DivisionByZero,
    OutsideDomain,
    NoConvergence,
    EvaluationAtSingularity,
    OutsideValidity,
    NumericOverflow,
)


class CertificateFailed(HeunKernelError):
    """A constructed kernel does not satisfy its kernel equation."""
