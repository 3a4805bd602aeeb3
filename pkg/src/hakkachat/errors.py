"""Exception types shared across the package."""

from __future__ import annotations


class HakkachatError(Exception):
    """Base class for all errors raised by this package."""


# --- ingestion ---------------------------------------------------------


class MalformedRow(HakkachatError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed row at line {line_no}" + (f": {reason}" if reason else ""))


class MalformedRecord(HakkachatError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed record at line {line_no}" + (f": {reason}" if reason else ""))


class DuplicateEntry(HakkachatError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"duplicate entry: {key}")


class SchemaMismatch(HakkachatError):
    pass


class EmptyManifest(HakkachatError):
    pass


class InvalidParams(HakkachatError):
    pass


# --- embedding / index --------------------------------------------------


class EmptyText(HakkachatError):
    pass


class ZeroVector(HakkachatError):
    pass


class DimensionMismatch(HakkachatError):
    pass


class EmptyCorpus(HakkachatError):
    pass


class EmbedderMismatch(HakkachatError):
    pass


class SnapshotFormatError(HakkachatError):
    """Unreadable or wrong-version snapshot bytes."""


# --- prompting ----------------------------------------------------------


class InconsistentBundle(HakkachatError):
    pass


class TemplateFormatError(HakkachatError):
    pass


# --- providers ----------------------------------------------------------


class ProviderError(HakkachatError):
    pass


class ProviderUnavailable(ProviderError):
    pass


class UnsupportedDirection(ProviderError):
    pass


class UntranslatableInput(ProviderError):
    pass


class QuotaExceeded(ProviderError):
    pass


class ContextTooLong(ProviderError):
    pass


# --- chat service -------------------------------------------------------


class EmptyInput(HakkachatError):
    pass


class UnknownSession(HakkachatError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id}")


class SessionStoreFailure(HakkachatError):
    pass


class CorruptStore(HakkachatError):
    def __init__(self, offset: int, reason: str = ""):
        self.offset = offset
        self.reason = reason
        super().__init__(f"corrupt store at byte {offset}" + (f": {reason}" if reason else ""))


# --- evaluation ---------------------------------------------------------


class InvalidItem(HakkachatError):
    pass


class FixtureMismatch(HakkachatError):
    pass
