"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command line
layer can map failures onto distinct exit payloads.
"""


class ProlateError(Exception):
    code = "error"

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        out.update({k: _plain(v) for k, v in self.detail.items()})
        return out


def _plain(v):
    try:
        import numpy as np

        if isinstance(v, np.generic):
            return v.item()
        if isinstance(v, np.ndarray):
            return v.tolist()
    except ImportError:  # pragma: no cover
        pass
    return v


class DomainError(ProlateError, ValueError):
    code = "domain"


class ConvergenceFailure(ProlateError, ArithmeticError):
    code = "convergence"


class TruncationInsufficient(ProlateError):
    code = "truncation"


class ResolutionInsufficient(ProlateError):
    code = "resolution"


class QuadratureInsufficient(ProlateError):
    code = "quadrature"


class SandwichViolation(ProlateError, AssertionError):
    code = "sandwich_violation"


class InterlacingViolation(ProlateError, AssertionError):
    code = "interlacing_violation"


class FitDegenerate(ProlateError):
    code = "fit_degenerate"


class PotentialNegative(ProlateError, ValueError):
    code = "potential_negative"


class DimensionUnsupported(ProlateError, ValueError):
    code = "dimension_unsupported"


class VerificationFailure(ProlateError, AssertionError):
    """Generic failed inequality in a verification suite."""

    code = "verification_failure"


INFRASTRUCTURE_ERRORS = (
    ConvergenceFailure,
    TruncationInsufficient,
    ResolutionInsufficient,
    QuadratureInsufficient,
    FitDegenerate,
    DimensionUnsupported,
)
