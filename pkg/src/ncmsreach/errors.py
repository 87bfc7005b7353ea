"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NCMSError(Exception):
    """Base class for every error raised by this package."""


class GridMismatchError(NCMSError, ValueError):
    """Two objects that must share a time grid do not."""


class DomainError(NCMSError, ValueError):
    """An interval, restriction or gluing precondition is violated."""


class ResourceCapError(NCMSError, RuntimeError):
    """An enumeration would exceed the configured materialization cap."""

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeds the materialization cap of {cap}")
        self.what = what
        self.cap = cap


class NotNCMSError(NCMSError, ValueError):
    """A trajectory set handed to NCMSInstance fails an NCMS axiom."""

    def __init__(self, report):
        super().__init__(f"trajectory set is not an NCMS: {report.summary()}")
        self.report = report


class CertificateError(NCMSError, ValueError):
    """A certificate is malformed or its sub-NCMS is not a sub-NCMS."""


class ParseError(NCMSError, ValueError):
    """Syntax error in an expression or a model file."""

    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        self.message = message
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos + 1}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class EvaluationError(NCMSError, ArithmeticError):
    """Division by zero, domain error or overflow while evaluating an expression."""
