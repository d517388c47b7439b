"""Exception types shared across the package."""


class NecklaceError(Exception):
    """Base class for all errors raised by this package."""


class SingularConstantTerm(NecklaceError):
    pass


class NameCollision(NecklaceError):
    pass


class QuiverMismatch(NecklaceError):
    pass


class TooLarge(NecklaceError):
    pass


class DegreeZero(NecklaceError):
    pass


class TruncationExceeded(NecklaceError):
    pass


class NotClosed(NecklaceError):
    pass


class NoSolution(NecklaceError):
    pass


class NotFreeAlgebra(NecklaceError):
    pass


class DeformedUnsupported(NecklaceError):
    pass


class PreconditionFailed(NecklaceError):
    """Raised when a check is requested on input outside its domain (e.g. a Dynkin quiver)."""


class ShapeMismatch(NecklaceError):
    pass


class ParseError(NecklaceError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NonComposablePath(ParseError):
    pass


class UnknownEdge(ParseError):
    pass


class ConfigError(NecklaceError):
    pass
