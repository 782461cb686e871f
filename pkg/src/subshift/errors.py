"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: configuration and input problems exit
with 2, insufficient samples (and I/O failures) with 3, broken internal
invariants with 4.
"""


class SubshiftError(Exception):
    exit_code = 1


class InvalidInput(SubshiftError, ValueError):
    exit_code = 2


class InvalidSpec(InvalidInput):
    """A generator or function description is malformed."""


class ConfigError(InvalidInput):
    pass


class ParseError(InvalidInput):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class NoFixedPoint(InvalidSpec):
    pass


class OracleLimit(SubshiftError):
    """Exhaustive oracle called beyond its size bound."""

    exit_code = 2


class InsufficientSample(SubshiftError):
    exit_code = 3


class SampleTooShort(InsufficientSample):
    pass


class InvariantViolation(SubshiftError):
    exit_code = 4


class OutputError(SubshiftError):
    exit_code = 3
