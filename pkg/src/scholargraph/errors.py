"""Exception hierarchy shared by all scholargraph modules.

Every error carries a stable ``code`` string that doubles as the machine
readable error identifier in API payloads and CLI diagnostics.
"""

from __future__ import annotations


class ScholarGraphError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# --- graph store ------------------------------------------------------------

class EmptyLabel(ScholarGraphError):
    code = "EmptyLabel"


class ClassesOnNonResource(ScholarGraphError):
    code = "ClassesOnNonResource"


class UnknownNode(ScholarGraphError):
    code = "UnknownNode"


class KindViolation(ScholarGraphError):
    code = "KindViolation"


class DuplicateTriple(ScholarGraphError):
    code = "DuplicateTriple"


class UnknownStatement(ScholarGraphError):
    code = "UnknownStatement"


class ReservedKey(ScholarGraphError):
    code = "ReservedKey"


class NotAResource(ScholarGraphError):
    code = "NotAResource"


class MalformedRecord(ScholarGraphError):
    """A dump line could not be parsed; reports the 1-based line number."""

    code = "MalformedRecord"

    def __init__(self, line_number: int, message: str = ""):
        super().__init__(f"line {line_number}: {message or 'malformed record'}")
        self.line_number = line_number


class IdCollision(ScholarGraphError):
    code = "IdCollision"


class ForwardReference(ScholarGraphError):
    """A statement record references a node that has not been seen yet."""

    code = "ForwardReference"

    def __init__(self, line_number: int, message: str = ""):
        super().__init__(f"line {line_number}: {message or 'forward reference'}")
        self.line_number = line_number


class SinkFailure(ScholarGraphError):
    code = "SinkFailure"


# --- contribution model -----------------------------------------------------

class ValidationFailed(ScholarGraphError):
    """Submission rejected; carries the full validation report."""

    code = "ValidationFailed"

    def __init__(self, report, message: str = "submission failed validation"):
        super().__init__(message)
        self.report = report


class UnknownField(ScholarGraphError):
    code = "UnknownField"


class UnknownNodeReference(ScholarGraphError):
    code = "UnknownNodeReference"


class NotAPaper(ScholarGraphError):
    code = "NotAPaper"


# --- metadata ingest ---------------------------------------------------------

class InvalidDoi(ScholarGraphError):
    code = "InvalidDoi"


class MissingTitle(ScholarGraphError):
    code = "MissingTitle"


class MalformedDocument(ScholarGraphError):
    code = "MalformedDocument"


class MetadataNotFound(ScholarGraphError):
    code = "NotFound"


class MetadataTimeout(ScholarGraphError):
    code = "Timeout"


class UpstreamError(ScholarGraphError):
    code = "UpstreamError"


# --- similarity / comparison -------------------------------------------------

class NotAContribution(ScholarGraphError):
    code = "NotAContribution"


class IndexStale(ScholarGraphError):
    code = "IndexStale"


class TooFewContributions(ScholarGraphError):
    code = "TooFewContributions"


# --- service ------------------------------------------------------------------

class PortInUse(ScholarGraphError):
    code = "PortInUse"


class DirectoryLocked(ScholarGraphError):
    code = "DirectoryLocked"


class CorruptLog(ScholarGraphError):
    """Event log unreadable; reports the first bad sequence number."""

    code = "CorruptLog"

    def __init__(self, sequence: int, message: str = ""):
        super().__init__(f"sequence {sequence}: {message or 'corrupt event log'}")
        self.sequence = sequence


class StorageFailure(ScholarGraphError):
    code = "StorageFailure"
