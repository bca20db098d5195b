"""Exception hierarchy shared by all modules."""


class DiscordQPTError(Exception):
    """Base class for every error raised by this package."""


class QuadratureError(DiscordQPTError):
    """Adaptive quadrature hit its subdivision limit without meeting tolerance."""


class UnsupportedModelError(DiscordQPTError):
    pass


class SizeLimitError(DiscordQPTError):
    pass


class TableParseError(DiscordQPTError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class TableRangeError(TableParseError):
    def __init__(self, line: int, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(line, f"{field}={value!r} outside [-1, 1]")


class InvalidStateError(DiscordQPTError):
    """The five X-state parameters do not describe a density matrix."""


class PatternViolationError(DiscordQPTError):
    """A channel produced a matrix outside the X-state zero pattern."""


class UnsupportedChannelError(DiscordQPTError):
    pass


class NegativeProbabilityError(DiscordQPTError):
    pass


class UnclassifiableError(DiscordQPTError):
    pass


class InsufficientDataError(DiscordQPTError):
    pass
