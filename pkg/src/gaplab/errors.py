"""Exception types shared across gaplab."""


class GaplabError(Exception):
    """Base class for all gaplab errors."""


class ZeroMeasureError(GaplabError, ValueError):
    """An operation needs a nonzero measure but got the zero measure."""


class WeightDomainError(GaplabError, ValueError):
    """A weight function drops below 1 at a site of the measure."""


class InfeasibleGapError(GaplabError, ValueError):
    """The requested gap radius cannot be realized on the given lattice."""


class ProfileSupportError(GaplabError, ValueError):
    """A periodic profile is not supported away from the gap."""


class SingularGramError(GaplabError, ArithmeticError):
    """Gram system is singular and no ridge was supplied."""


class ConsistencyError(GaplabError, RuntimeError):
    """An internal numerical consistency check failed."""


class BracketError(GaplabError, ValueError):
    """No regime change was found inside a bisection bracket."""


class PreconditionError(GaplabError, ValueError):
    """A numerically verified precondition does not hold."""


class NotApplicableError(GaplabError, ValueError):
    """The check does not apply to this input (e.g. one-signed measure)."""
