"""Exception types shared across the package."""


class SvkitError(Exception):
    """Base class for all svkit errors."""


class ValidationError(SvkitError, ValueError):
    """Invalid argument: bad wire index, arity mismatch, malformed structure."""


class CapacityError(SvkitError):
    """Requested register exceeds what this build can allocate or address."""


class UnsupportedOperationError(SvkitError):
    """Operation is well-formed but outside the supported set."""


class ParseError(SvkitError):
    """Syntax error in a circuit or Hamiltonian text file.

    Carries 1-based ``line`` and ``column`` positions plus the offending
    source line so callers can render a caret diagnostic.
    """

    def __init__(self, message, line, column, source_line=""):
        self.line = line
        self.column = column
        self.source_line = source_line
        super().__init__(message)

    def __str__(self):
        msg = f"line {self.line}, column {self.column}: {self.args[0]}"
        if self.source_line:
            caret = " " * (self.column - 1) + "^"
            msg += f"\n  {self.source_line}\n  {caret}"
        return msg
