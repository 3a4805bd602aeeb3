"""Chat sessions and their on-disk store.

The store is an append-only log of length-prefixed JSON records (u32
payload length, u32 CRC-32, payload).  A crash can only tear the final
record, which is detected by the length prefix running past end-of-file
and dropped with a warning on load; a complete record that fails its
checksum is real corruption and refuses to load.  Reloading a persisted
store always reproduces the same sessions.
"""

from __future__ import annotations

import json
import logging
import os
import secrets
import struct
import threading
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import CorruptStore, SessionStoreFailure, UnknownSession
from .routing import Route

logger = logging.getLogger(__name__)

_RECORD_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class Citation:
    citation_id: str
    source_kind: str
    ref: str
    quote: str


@dataclass(frozen=True)
class AnswerEnvelope:
    answer: str
    route: Route
    citations: tuple[Citation, ...]
    latency_ms: int
    degraded: str | None = None


@dataclass(frozen=True)
class ChatMessage:
    turn: int
    author: str
    text: str
    envelope: AnswerEnvelope | None = None


@dataclass
class ChatSession:
    session_id: str
    created_at_ms: int
    answer_in_hakka: bool = False
    messages: list[ChatMessage] = field(default_factory=list)


@dataclass(frozen=True)
class SessionSummary:
    session_id: str
    created_at_ms: int
    message_count: int


def envelope_to_dict(envelope: AnswerEnvelope) -> dict:
    return {
        "answer": envelope.answer,
        "route": envelope.route.value,
        "citations": [
            {"citation_id": c.citation_id, "source_kind": c.source_kind, "ref": c.ref, "quote": c.quote}
            for c in envelope.citations
        ],
        "latency_ms": envelope.latency_ms,
        "degraded": envelope.degraded,
    }


def envelope_from_dict(data: dict) -> AnswerEnvelope:
    return AnswerEnvelope(
        answer=data["answer"],
        route=Route(data["route"]),
        citations=tuple(
            Citation(
                citation_id=c["citation_id"],
                source_kind=c["source_kind"],
                ref=c["ref"],
                quote=c["quote"],
            )
            for c in data["citations"]
        ),
        latency_ms=data["latency_ms"],
        degraded=data.get("degraded"),
    )


def _message_to_dict(message: ChatMessage) -> dict:
    return {
        "turn": message.turn,
        "author": message.author,
        "text": message.text,
        "envelope": envelope_to_dict(message.envelope) if message.envelope else None,
    }


def _message_from_dict(data: dict) -> ChatMessage:
    envelope = envelope_from_dict(data["envelope"]) if data.get("envelope") else None
    return ChatMessage(turn=data["turn"], author=data["author"], text=data["text"], envelope=envelope)


def now_ms() -> int:
    return int(datetime.now(timezone.utc).timestamp() * 1000)


class SessionStore:
    """In-memory session map backed by an append-only log.

    ``path=None`` keeps everything in memory (tests, ephemeral servers).
    Records are flushed and fsynced per append so a committed turn
    survives a crash.
    """

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._sessions: dict[str, ChatSession] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self.recovered_torn_record = False
        if self._path is not None and self._path.exists():
            self._replay(self._path.read_bytes())

    # --- public API -----------------------------------------------------

    def create_session(self, answer_in_hakka: bool = False) -> ChatSession:
        session = ChatSession(
            session_id=secrets.token_hex(16),
            created_at_ms=now_ms(),
            answer_in_hakka=answer_in_hakka,
        )
        with self._lock:
            self._sessions[session.session_id] = session
            self._order.append(session.session_id)
            self._append_record(
                {
                    "type": "session_created",
                    "session_id": session.session_id,
                    "created_at_ms": session.created_at_ms,
                    "answer_in_hakka": session.answer_in_hakka,
                }
            )
        return session

    def get_session(self, session_id: str) -> ChatSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def list_sessions(self, offset: int = 0, limit: int = 50) -> list[SessionSummary]:
        with self._lock:
            ids = self._order[offset : offset + limit]
            return [
                SessionSummary(
                    session_id=sid,
                    created_at_ms=self._sessions[sid].created_at_ms,
                    message_count=len(self._sessions[sid].messages),
                )
                for sid in ids
            ]

    def append_turn(self, session_id: str, user: ChatMessage, assistant: ChatMessage) -> None:
        """Persist both halves of a turn as one record: the pair either
        lands completely or not at all."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(session_id)
            self._append_record(
                {
                    "type": "turn",
                    "session_id": session_id,
                    "user": _message_to_dict(user),
                    "assistant": _message_to_dict(assistant),
                }
            )
            session.messages.append(user)
            session.messages.append(assistant)

    def session_count(self) -> int:
        with self._lock:
            return len(self._sessions)

    # --- log handling -----------------------------------------------------

    def _append_record(self, record: dict) -> None:
        if self._path is None:
            return
        payload = json.dumps(record, ensure_ascii=False, sort_keys=True).encode("utf-8")
        frame = _RECORD_HEADER.pack(len(payload), zlib.crc32(payload)) + payload
        try:
            with open(self._path, "ab") as handle:
                handle.write(frame)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise SessionStoreFailure(f"cannot append to {self._path}: {exc}") from exc

    def _replay(self, raw: bytes) -> None:
        offset = 0
        while offset < len(raw):
            if offset + _RECORD_HEADER.size > len(raw):
                self._drop_tail(offset)
                return
            length, checksum = _RECORD_HEADER.unpack_from(raw, offset)
            payload_start = offset + _RECORD_HEADER.size
            if payload_start + length > len(raw):
                self._drop_tail(offset)
                return
            payload = raw[payload_start : payload_start + length]
            if zlib.crc32(payload) != checksum:
                raise CorruptStore(offset, "record checksum mismatch")
            try:
                record = json.loads(payload.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                raise CorruptStore(offset, f"undecodable record: {exc}") from exc
            self._apply(record, offset)
            offset = payload_start + length

    def _drop_tail(self, offset: int) -> None:
        self.recovered_torn_record = True
        logger.warning("dropping torn final record at byte %d of %s", offset, self._path)

    def _apply(self, record: dict, offset: int) -> None:
        kind = record.get("type")
        if kind == "session_created":
            session = ChatSession(
                session_id=record["session_id"],
                created_at_ms=record["created_at_ms"],
                answer_in_hakka=record.get("answer_in_hakka", False),
            )
            self._sessions[session.session_id] = session
            self._order.append(session.session_id)
        elif kind == "turn":
            session = self._sessions.get(record["session_id"])
            if session is None:
                raise CorruptStore(offset, f"turn for unknown session {record['session_id']}")
            session.messages.append(_message_from_dict(record["user"]))
            session.messages.append(_message_from_dict(record["assistant"]))
        else:
            raise CorruptStore(offset, f"unknown record type {kind!r}")
