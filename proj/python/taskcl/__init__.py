"""Task-oriented computability logic interpreter."""

from ._taskcl import (
    BadTerm,
    DomainMissing,
    EnvExhausted,
    IllegalState,
    OutOfRange,
    ParseError,
    PolarityError,
    ScriptMismatch,
    Sessions,
    TaskclError,
    UnknownSession,
    handle_request,
    normalize,
    parse_program,
    parse_query,
    solve,
    unify,
    verify,
)

__all__ = [
    "BadTerm",
    "DomainMissing",
    "EnvExhausted",
    "IllegalState",
    "OutOfRange",
    "ParseError",
    "PolarityError",
    "ScriptMismatch",
    "Sessions",
    "TaskclError",
    "UnknownSession",
    "handle_request",
    "normalize",
    "parse_program",
    "parse_query",
    "solve",
    "unify",
    "verify",
]
