"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ValueError):
    """A special function was evaluated outside its domain."""


class SingularShiftError(ArithmeticError):
    """``Q + S`` has an exactly vanishing eigenvalue, so ``ln det`` diverges."""


class PrecisionLossError(ValueError):
    """The requested order cannot be computed reliably in double precision."""


class UnsupportedOrder(ValueError):
    """No asymptotic constant is known for the requested cumulant order."""


class NoDecayError(RuntimeError):
    """The characteristic function did not decay below the requested level."""


class FitFailure(RuntimeError):
    """A least-squares fit did not converge.

    Attributes
    ----------
    diagnostics : dict
        Last parameter vector, cost, gradient norm and iteration count.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
