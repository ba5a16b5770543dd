"""Exception hierarchy shared by all modules."""


class DetsingError(Exception):
    """Base class for every error raised by the package."""


class PolySyntaxError(DetsingError, ValueError):
    """Malformed polynomial text. ``position`` is the 0-based offset of the fault."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownVariable(PolySyntaxError):
    pass


class ResourceLimit(DetsingError):
    """A degree, basis-size or step bound was exceeded. Never a silent truncation."""


class IdealIsUnit(DetsingError, ValueError):
    pass


class NonIsolated(DetsingError):
    """Infinite colength where a finite one was required."""


class NotAGerm(DetsingError, ValueError):
    pass


class NonIntegerResult(DetsingError, ArithmeticError):
    pass


class NotICIS(DetsingError):
    pass


class NotSmoothable(DetsingError):
    pass


class GenericityExhausted(DetsingError):
    """All seeded retries produced non-generic choices."""


class DimensionMismatch(DetsingError):
    pass


class ZeroForm(DetsingError, ValueError):
    pass


class RegimeMismatch(DetsingError):
    pass


class MissingInput(DetsingError):
    """An invariant could not be computed and was not supplied."""

    def __init__(self, name, hint=None):
        self.name = name
        self.hint = hint
        msg = f"missing input {name!r}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)


class OutOfRange(DetsingError, ValueError):
    pass
