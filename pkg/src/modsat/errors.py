"""Exception hierarchy shared by every modsat module."""


class ModsatError(Exception):
    """Base class for all user-facing errors."""


class ParseError(ModsatError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class CircuitError(ModsatError):
    """Structurally invalid circuit (cycle, arity mismatch, bad modality index)."""


class ArityError(ModsatError, ValueError):
    pass


class ResourceError(ModsatError):
    """A size or enumeration cap was exceeded."""


class SearchExhaustedError(ModsatError):
    """Implementation search hit its depth cap without a result."""


class NotInCloneError(SearchExhaustedError):
    """The target function is provably outside the generated clone."""


class PreconditionError(ModsatError):
    """An engine was asked to decide an instance outside its class."""


class UnsupportedFrameError(ModsatError):
    pass
