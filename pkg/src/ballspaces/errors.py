"""Exception types shared across the package."""


class BallSpaceError(Exception):
    """Base class for every error raised by this package."""


class InvalidBallError(BallSpaceError):
    """A ball is malformed or does not belong to the space's collection."""


class UnsupportedModeError(BallSpaceError):
    """The operation needs exhaustive enumeration that this space cannot provide."""


class InvalidAssignmentError(BallSpaceError):
    """A point-to-ball assignment is partial or leaves the ball collection."""


class DomainMismatchError(BallSpaceError):
    """Operands live in different spaces, posets, or residue systems."""


class ContractViolationError(BallSpaceError):
    """A caller-supplied callback broke its documented contract."""

    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f"{condition}: {message}")


class NonUnitDerivativeError(BallSpaceError):
    """The derivative is not a unit, so the update step is undefined."""


class EmptyPreimageError(BallSpaceError):
    """Some target balls have no preimage and cannot be pulled back."""

    def __init__(self, balls):
        self.balls = tuple(balls)
        names = ", ".join(sorted("{" + ",".join(sorted(b)) + "}" for b in self.balls))
        super().__init__(f"balls with empty preimage: {names}")


class ContractionBoundError(BallSpaceError):
    """An observed step violated the declared contraction inequality."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class NotAFixedPointError(BallSpaceError):
    """A claimed fixed point is not actually fixed."""


class PreconditionError(BallSpaceError):
    """An operation precondition does not hold for the given inputs."""


class BudgetError(BallSpaceError):
    """The iteration budget is invalid or was exhausted."""


class OrderRelationError(BallSpaceError):
    """A relation fails the partial-order laws."""


class ScenarioError(BallSpaceError):
    """A scenario file failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class InternalCheckError(BallSpaceError):
    """An internal assertion failed; this contradicts a verified hypothesis."""
