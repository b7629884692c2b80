"""Exception hierarchy shared by all fblsec modules."""


class FblsecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FblsecError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class PreconditionError(DomainError):
    """A model-specific validity condition is violated."""


class ModelError(FblsecError, ValueError):
    """The requested leakage model is not valid for the scenario."""


class InfeasibleError(FblsecError):
    """No design satisfies the secrecy constraint (e.g. delta = 0)."""


class BracketError(FblsecError):
    """A root-finding bracket does not contain a sign change."""

    def __init__(self, message, lo=None, hi=None, f_lo=None, f_hi=None):
        super().__init__(message)
        self.lo, self.hi = lo, hi
        self.f_lo, self.f_hi = f_lo, f_hi


class ConvergenceError(FblsecError):
    """An iterative method ran out of iterations.

    ``best`` carries the best available estimate and ``error`` its
    estimated error (if known).
    """

    def __init__(self, message, best=None, error=None):
        super().__init__(message)
        self.best = best
        self.error = error
