from .exceptions import (
    DomainError,
    ConfigurationError,
    ConfigParseError,
    NoRevivalFound,
    NonFiniteObjective,
    InsufficientFrames,
    OutputRefused,
)
