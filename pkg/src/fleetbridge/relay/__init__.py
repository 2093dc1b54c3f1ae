from .core import (
    ClientSession,
    PatternError,
    RelayCore,
    RelayError,
    SessionClosed,
    SpoofError,
)

__all__ = ["ClientSession", "PatternError", "RelayCore", "RelayError",
           "SessionClosed", "SpoofError"]
