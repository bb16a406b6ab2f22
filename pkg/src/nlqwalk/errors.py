"""Exception types raised by nlqwalk."""


class NLQWalkError(Exception):
    """Base class for all package errors."""


class InvalidSizeError(NLQWalkError, ValueError):
    pass


class DimensionError(NLQWalkError, ValueError):
    pass


class DomainError(NLQWalkError, ValueError):
    pass


class PreconditionError(NLQWalkError, ValueError):
    pass


class NonFiniteError(NLQWalkError, ArithmeticError):
    pass


class ScheduleError(NLQWalkError, ValueError):
    pass


class CoverageError(NLQWalkError, ValueError):
    pass


class ProtocolError(NLQWalkError, ValueError):
    pass


class IntegrationError(NLQWalkError, RuntimeError):
    """The integrator gave up; ``t`` is the last time it reached."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
