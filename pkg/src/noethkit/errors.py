"""Exception hierarchy shared by all noethkit modules."""


class NoethkitError(Exception):
    """Base class for every error raised by noethkit."""


class ParseError(NoethkitError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownVariableError(ParseError):
    pass


class ArenaMismatchError(NoethkitError):
    pass


class DimensionError(NoethkitError):
    pass


class AxisError(NoethkitError):
    pass


class PreconditionError(NoethkitError):
    pass


class InconclusiveError(NoethkitError):
    """An oracle could not settle its answer within the allowed truncation order."""

    def __init__(self, message, order=None):
        self.order = order
        super().__init__(message)


class UnstableCountError(InconclusiveError):
    pass


class NotGenericError(NoethkitError):
    pass


class DegreeLedgerError(NoethkitError):
    """A constructed polynomial exceeded the degree budget predicted by the bounds."""


class PrecisionInsufficientError(NoethkitError):
    pass


class SolverError(NoethkitError):
    pass
