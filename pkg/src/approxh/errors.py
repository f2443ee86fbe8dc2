"""Exception types raised across the package."""


class ApproxHError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidArgument(ApproxHError, ValueError):
    code = "invalid-argument"


class NotFound(ApproxHError, LookupError):
    code = "not-found"


class SizeLimit(ApproxHError):
    code = "size-limit"


class DecompositionFailure(ApproxHError):
    code = "decomposition-failure"


class FlatnessFailure(ApproxHError):
    code = "flatness-failure"


class CertificationFailure(ApproxHError):
    code = "certification-failure"


class ResampleExhausted(ApproxHError):
    code = "resample-exhausted"


class BudgetExceeded(ApproxHError):
    code = "budget-exceeded"
