"""Exception hierarchy shared by every module."""


class LphardError(Exception):
    """Base class for all package errors."""


class DomainError(LphardError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(LphardError, RuntimeError):
    """A bracketing or bisection loop failed to terminate."""


class InfeasibleError(LphardError, ValueError):
    """A constraint system has no solution for the requested parameters."""


class BudgetExceeded(LphardError, RuntimeError):
    """Enumeration hit its node cap.

    ``partial`` holds whatever was counted before the cap was reached.
    """

    def __init__(self, message, partial=None, nodes=0):
        super().__init__(message)
        self.partial = partial
        self.nodes = nodes


class RankTooLarge(LphardError, ValueError):
    """The lattice exceeds the desk-scale rank cap."""


class NotInLattice(LphardError, ValueError):
    """A vector is not an integer combination of the basis columns."""


class DimensionMismatch(LphardError, ValueError):
    """Shapes of a basis, target or block do not agree."""


class StageError(LphardError, RuntimeError):
    """Failure inside a multi-stage pipeline, labelled with the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
