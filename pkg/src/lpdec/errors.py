"""Exception types shared across the package."""


class LpdecError(Exception):
    """Base class for all package errors."""


class ContractViolation(LpdecError, ValueError):
    """Arguments violate an operation's preconditions (dimensions, finiteness)."""


class ParseError(LpdecError, ValueError):
    """Malformed instance text; message carries file and line position."""


class SolverFailure(LpdecError, RuntimeError):
    """Numerical breakdown inside the interior-point method.

    Carries the offending iterate in ``state`` (may be None) and, when the
    failure happened inside a decision algorithm, the gamble index in
    ``index``.
    """

    def __init__(self, message, state=None, index=None):
        super().__init__(message)
        self.state = state
        self.index = index


class SureLossError(LpdecError):
    """The lower prevision incurs sure loss; its credal set is empty."""


class DegenerateCredalError(LpdecError):
    """The credal set has empty interior; no strictly feasible start exists."""


class GenerationError(LpdecError):
    """Controlled instance generation failed to meet its contract."""
