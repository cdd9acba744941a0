"""Exception hierarchy shared by every module."""


class ToralError(Exception):
    """Base class for domain errors (bad input, violated preconditions)."""


class DimensionError(ToralError, ValueError):
    pass


class ModulusMismatchError(ToralError, ValueError):
    pass


class MatrixParseError(ToralError, ValueError):
    """Raised for malformed matrix text; ``position`` is the offending column."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NotInvertibleError(ToralError):
    pass


class PreconditionError(ToralError):
    pass


class PlateauError(PreconditionError):
    """A generic-prime closed form was requested where a plateau occurs."""


class CapExceededError(ToralError):
    """An exhaustive computation would exceed its configured cap."""

    def __init__(self, what, required, cap):
        super().__init__(f"{what} needs {required} but the cap is {cap}; raise the cap to at least {required}")
        self.required = required
        self.cap = cap


class InconsistencyError(RuntimeError):
    """Two routes that must agree did not. Always a bug."""
