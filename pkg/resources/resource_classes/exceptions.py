"""Contains all custom `Exceptions`"""


class DomainError(Exception):
    """The exception for when a physical precondition is violated"""

    pass


class ConfigurationError(Exception):
    """The exception for when a numerical configuration cannot be used"""

    pass


class ConfigParseError(ConfigurationError):
    """The exception for when a line of a run configuration cannot be parsed"""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        self.message = message
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class NoRevivalFound(Exception):
    """The exception for when no Talbot revival is present at a plane"""

    pass


class NonFiniteObjective(Exception):
    """The exception for when the curvature fit objective is not finite"""

    pass


class InsufficientFrames(Exception):
    """The exception for when a frame stack is too small for an operation"""

    pass


class OutputRefused(Exception):
    """The exception for when results could not be written to disk"""

    pass
