"""Exception types shared across the solver stack."""


class NetmonError(Exception):
    """Base class for all package errors."""


class InputError(NetmonError):
    """Malformed or inconsistent user input (bad identifiers, bounds, files)."""


class CapacityError(NetmonError):
    """An enumeration guard was exceeded; carries the offending count."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class SolverFailure(NetmonError):
    """Internal solver gave up (iteration cap, numerical breakdown)."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class InvariantViolation(NetmonError):
    """A condition guaranteed by construction failed; indicates a bug."""
