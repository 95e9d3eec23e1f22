"""Shared exception types."""


class VertiopsError(Exception):
    """Base class for all package errors."""


class IllegalCharacter(VertiopsError):
    def __init__(self, char: str, line: int, column: int):
        super().__init__(f"illegal character {char!r} at {line}:{column}")
        self.char = char
        self.line = line
        self.column = column


class ParseError(VertiopsError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.expected = tuple(expected)


class GroundingError(VertiopsError):
    pass


class NonGroundInterval(GroundingError):
    pass


class ArithmeticOnSymbol(GroundingError):
    pass


class UnsafeRule(GroundingError):
    """Raised when grounding is attempted on a rule that fails the safety check."""

    def __init__(self, rule_text: str, variables):
        super().__init__(f"unsafe variables {sorted(variables)} in rule: {rule_text}")
        self.variables = frozenset(variables)


class UnstratifiedAggregate(VertiopsError):
    pass


class UndecidedDependency(VertiopsError):
    pass


class NotInModel(VertiopsError):
    pass


class TooLarge(VertiopsError):
    pass


class ValidationError(VertiopsError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ShapeError(VertiopsError):
    pass


class UnknownAgent(VertiopsError):
    pass


class UnknownVertiport(VertiopsError):
    pass


class WaypointOutOfRange(VertiopsError):
    pass


class HorizonExceeded(VertiopsError):
    pass


class NoEpisode(VertiopsError):
    """A landing request was injected with no closure episode in progress."""


class NoSession(VertiopsError):
    pass
