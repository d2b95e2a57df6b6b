"""Exception hierarchy shared across the package.

Two broad families matter for the CLI exit codes: ValidationError (bad
arguments or configuration, exit 1) and DataError (well-formed request,
bad data, exit 2).
"""


class SmellcastError(Exception):
    """Base class for all smellcast errors."""


class ValidationError(SmellcastError):
    """Invalid arguments, configuration, or call contract violations."""


class DataError(SmellcastError):
    """Input data that cannot be processed (degenerate, inconsistent)."""


class ParseError(DataError):
    """A file failed to parse. Carries the offending line number."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class StructuralError(ParseError):
    """A parsed file violates a structural rule (e.g. undeclared node)."""


class SchemaError(DataError):
    """Two artifacts that must agree (features, pair sets) do not."""
