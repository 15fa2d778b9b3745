"""Exception taxonomy shared by every module in the package.

All errors raised deliberately by this package derive from TrqgError so
callers can catch one type at the boundary. The CLI maps UsageError to
exit code 2 and every other TrqgError to exit code 1.
"""

from __future__ import annotations


class TrqgError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(TrqgError):
    """The caller asked for something that cannot be interpreted.

    Unknown dataset names, unknown task or format names, empty report
    lists, mixed metric kinds and the like. Not retryable.
    """


class ParseError(TrqgError):
    """Input bytes are not well-formed JSON."""

    def __init__(self, message: str, byte_position: int | None = None):
        if byte_position is not None:
            message = f"{message} (byte {byte_position})"
        super().__init__(message)
        self.byte_position = byte_position


class SchemaError(TrqgError):
    """Well-formed JSON that does not match the expected document shape.

    Carries the path of the offending element, e.g.
    ``data[3].paragraphs[0].qas[2].answers``.
    """

    def __init__(self, message: str, path: str = ""):
        if path:
            message = f"{message} (at {path})"
        super().__init__(message)
        self.path = path


class IntegrityError(TrqgError):
    """Downloaded bytes do not match the digest pinned in the manifest."""


class TransportError(TrqgError):
    """Network-level failure (connect, timeout) after retries were spent.

    The operation may succeed if repeated later; nothing about the
    request itself was rejected.
    """


class ProtocolError(TrqgError):
    """The remote spoke HTTP but violated the generation wire contract."""


class BackendError(TrqgError):
    """The generation backend returned a non-2xx response."""

    def __init__(self, message: str, status: int | None = None, body: str = ""):
        if status is not None:
            message = f"{message} (status {status})"
        if body:
            message = f"{message}: {body[:200]}"
        super().__init__(message)
        self.status = status
        self.body = body


class RuleError(UsageError):
    """A sentence-splitting rule file entry could not be compiled."""

    def __init__(self, message: str, rule_id: str = ""):
        if rule_id:
            message = f"rule {rule_id!r}: {message}"
        super().__init__(message)
        self.rule_id = rule_id


class EvaluationError(TrqgError):
    """Predictions and gold data cannot be aligned for scoring."""


class ContractViolation(TrqgError):
    """A documented precondition was violated by the caller."""
