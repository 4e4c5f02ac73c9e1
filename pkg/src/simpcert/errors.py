"""Exception hierarchy shared by all modules."""


class SimpcertError(Exception):
    """Base class for engine errors."""


class PLError(SimpcertError, ValueError):
    """Invalid piecewise-linear data or violated construction precondition."""


class CantorError(SimpcertError, ValueError):
    """Invalid cylinder/clopen/prefix-map data or violated precondition."""


class PreconditionError(SimpcertError, ValueError):
    """A displacement or commutation precondition does not hold."""


class VerificationError(SimpcertError):
    """An exact post-verification failed.

    ``stage`` names the pipeline step that produced the bad value.
    """

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class ParseError(SimpcertError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        loc = f"line {line}" + (f", column {column}" if column else "") if line else ""
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.column = column
