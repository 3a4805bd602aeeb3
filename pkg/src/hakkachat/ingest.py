"""Knowledge-base ingestion: parse the five source files into normalized
documents, chunk them for indexing, and assemble an immutable corpus.

Source formats (all UTF-8):
  * dictionary / characteristic words / gazetteer: TSV with a header row
  * encyclopedia / Ministry-of-Education knowledge base: JSONL with
    string fields ``key``, ``title``, ``body``

Document ids are stable across re-ingestion: ``<source_kind>:<local key>``
where the local key is derived from the row itself (headword#pronunciation
for dictionary entries, town#region for gazetteer entries, the record key
for articles).
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import (
    DuplicateEntry,
    EmptyManifest,
    HakkachatError,
    InvalidParams,
    MalformedRecord,
    MalformedRow,
    SchemaMismatch,
    SnapshotFormatError,
)

DEFAULT_MAX_CHARS = 512
DEFAULT_OVERLAP = 64

# Sentence-final characters at which non-atomic documents may be split.
SENTENCE_BOUNDARIES = "。.!?\n"

_HWS_RUN = re.compile(r"[^\S\n]+")


class SourceKind(str, Enum):
    ENCYCLOPEDIA = "encyclopedia"
    MOE_KNOWLEDGE_BASE = "moe_knowledge_base"
    DICTIONARY = "dictionary"
    CHARACTERISTIC_WORDS = "characteristic_words"
    GAZETTEER = "gazetteer"


# Lexical entries are never split across chunks: a headword must keep its
# whole gloss in one retrieval unit.
ATOMIC_SOURCES = frozenset({SourceKind.DICTIONARY, SourceKind.CHARACTERISTIC_WORDS})


@dataclass(frozen=True)
class Document:
    id: str
    source: SourceKind
    title: str
    body: str
    headword: str | None = None
    region: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    seq: int
    text: str
    char_span: tuple[int, int]


def normalize_text(raw: str) -> str:
    """Unify line endings to ``\\n``, collapse runs of horizontal
    whitespace to single spaces, and strip each line.  Total function;
    CJK characters pass through untouched."""
    unified = raw.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(_HWS_RUN.sub(" ", line).strip() for line in unified.split("\n"))


def _split_tsv_lines(lines: Iterable[str]) -> Iterable[tuple[int, list[str]]]:
    for line_no, line in enumerate(lines, start=1):
        stripped = line.rstrip("\r\n")
        if stripped == "" and line_no > 1:
            continue
        yield line_no, stripped.split("\t")


def _tsv_header(fields: list[str], required: tuple[str, ...]) -> dict[str, int]:
    positions = {name: i for i, name in enumerate(fields)}
    missing = [name for name in required if name not in positions]
    if missing:
        raise SchemaMismatch(f"header missing column(s): {', '.join(missing)}")
    return positions


def _cell(fields: list[str], positions: dict[str, int], name: str) -> str:
    idx = positions.get(name, -1)
    if idx < 0 or idx >= len(fields):
        return ""
    return fields[idx].strip()


def parse_dictionary(lines: Iterable[str]) -> list[Document]:
    """One document per dictionary row.

    The body carries the definition first, then labeled pronunciation and
    example lines when those cells are non-empty.  Pronunciation is also
    kept in metadata so retrieval hits can surface it separately.
    """
    docs: list[Document] = []
    seen: set[tuple[str, str]] = set()
    positions: dict[str, int] | None = None
    for line_no, fields in _split_tsv_lines(lines):
        if positions is None:
            positions = _tsv_header(fields, ("headword", "pronunciation", "definition"))
            continue
        headword = _cell(fields, positions, "headword")
        pronunciation = _cell(fields, positions, "pronunciation")
        definition = _cell(fields, positions, "definition")
        example = _cell(fields, positions, "example")
        if len(fields) < 3 or not headword or not definition:
            raise MalformedRow(line_no, "need headword, pronunciation and definition")
        key = (headword, pronunciation)
        if key in seen:
            raise DuplicateEntry(f"{headword}#{pronunciation}")
        seen.add(key)
        body_lines = [definition]
        if pronunciation:
            body_lines.append(f"發音：{pronunciation}")
        if example:
            body_lines.append(f"例句：{example}")
        metadata = {"pronunciation": pronunciation} if pronunciation else {}
        docs.append(
            Document(
                id=f"{SourceKind.DICTIONARY.value}:{headword}#{pronunciation}",
                source=SourceKind.DICTIONARY,
                title=headword,
                body=normalize_text("\n".join(body_lines)),
                headword=headword,
                metadata=metadata,
            )
        )
    if positions is None:
        raise SchemaMismatch("empty input: missing header row")
    return docs


def parse_characteristic_words(lines: Iterable[str]) -> list[Document]:
    """One document per curated characteristic-word row (columns
    ``headword``, ``description``)."""
    docs: list[Document] = []
    seen: set[str] = set()
    positions: dict[str, int] | None = None
    for line_no, fields in _split_tsv_lines(lines):
        if positions is None:
            positions = _tsv_header(fields, ("headword", "description"))
            continue
        headword = _cell(fields, positions, "headword")
        description = _cell(fields, positions, "description")
        if len(fields) < 2 or not headword or not description:
            raise MalformedRow(line_no, "need headword and description")
        if headword in seen:
            raise DuplicateEntry(headword)
        seen.add(headword)
        docs.append(
            Document(
                id=f"{SourceKind.CHARACTERISTIC_WORDS.value}:{headword}",
                source=SourceKind.CHARACTERISTIC_WORDS,
                title=headword,
                body=normalize_text(description),
                headword=headword,
            )
        )
    if positions is None:
        raise SchemaMismatch("empty input: missing header row")
    return docs


def parse_gazetteer(lines: Iterable[str]) -> list[Document]:
    """One document per town/village row (columns ``town``, ``region``,
    ``description``); the region is kept as a dedicated field."""
    docs: list[Document] = []
    seen: set[tuple[str, str]] = set()
    positions: dict[str, int] | None = None
    for line_no, fields in _split_tsv_lines(lines):
        if positions is None:
            positions = _tsv_header(fields, ("town", "region", "description"))
            continue
        town = _cell(fields, positions, "town")
        region = _cell(fields, positions, "region")
        description = _cell(fields, positions, "description")
        if len(fields) < 3 or not town or not region or not description:
            raise MalformedRow(line_no, "need town, region and description")
        key = (town, region)
        if key in seen:
            raise DuplicateEntry(f"{town}#{region}")
        seen.add(key)
        docs.append(
            Document(
                id=f"{SourceKind.GAZETTEER.value}:{town}#{region}",
                source=SourceKind.GAZETTEER,
                title=town,
                body=normalize_text(description),
                region=region,
            )
        )
    if positions is None:
        raise SchemaMismatch("empty input: missing header row")
    return docs


def parse_articles(lines: Iterable[str], kind: SourceKind) -> list[Document]:
    """One document per JSONL record with string fields ``key``,
    ``title`` and ``body``."""
    if kind not in (SourceKind.ENCYCLOPEDIA, SourceKind.MOE_KNOWLEDGE_BASE):
        raise InvalidParams(f"article parser does not handle source kind {kind.value!r}")
    docs: list[Document] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            record = json.loads(stripped)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedRecord(line_no, str(exc)) from exc
        if not isinstance(record, dict):
            raise MalformedRecord(line_no, "record is not an object")
        for name in ("key", "title", "body"):
            if not isinstance(record.get(name), str) or not record[name].strip():
                raise MalformedRecord(line_no, f"missing or empty field {name!r}")
        key = record["key"]
        if key in seen:
            raise DuplicateEntry(key)
        seen.add(key)
        body = normalize_text(record["body"])
        if not body.strip():
            raise MalformedRecord(line_no, "body empty after normalization")
        docs.append(
            Document(
                id=f"{kind.value}:{key}",
                source=kind,
                title=record["title"].strip(),
                body=body,
            )
        )
    return docs


def chunk_document(doc: Document, max_chars: int = DEFAULT_MAX_CHARS, overlap: int = DEFAULT_OVERLAP) -> list[Chunk]:
    """Split a document body into indexable chunks.

    Dictionary and characteristic-word documents are atomic: exactly one
    chunk regardless of length.  Other documents are cut greedily at
    sentence boundaries so that each chunk holds at most ``max_chars``
    characters, falling back to a hard character split when no usable
    boundary exists inside the window.  Consecutive chunks share exactly
    ``overlap`` characters; spans index into the normalized body, so
    stitching ``body[start:end]`` pieces reproduces it exactly.

    Character counts are Unicode scalar counts, never bytes.
    """
    if max_chars <= 0 or overlap < 0 or overlap >= max_chars:
        raise InvalidParams(f"need 0 <= overlap < max_chars, got overlap={overlap} max_chars={max_chars}")
    body = doc.body
    if not body:
        raise InvalidParams(f"document {doc.id} has an empty body")
    if doc.source in ATOMIC_SOURCES:
        return [Chunk(doc_id=doc.id, seq=0, text=body, char_span=(0, len(body)))]

    boundaries = [i + 1 for i, ch in enumerate(body) if ch in SENTENCE_BOUNDARIES]
    chunks: list[Chunk] = []
    start = 0
    while True:
        limit = start + max_chars
        if limit >= len(body):
            end = len(body)
        else:
            # A cut must advance past the overlap region or the next
            # chunk would not make progress.
            usable = [b for b in boundaries if start < b <= limit and b - start > overlap]
            end = max(usable) if usable else limit
        chunks.append(Chunk(doc_id=doc.id, seq=len(chunks), text=body[start:end], char_span=(start, end)))
        if end == len(body):
            return chunks
        start = end - overlap


@dataclass(frozen=True)
class Corpus:
    """Immutable ingestion result: documents and chunks in canonical
    order (sorted by document id, then chunk seq)."""

    documents: tuple[Document, ...]
    chunks: tuple[Chunk, ...]
    max_chars: int = DEFAULT_MAX_CHARS
    overlap: int = DEFAULT_OVERLAP

    def stats(self) -> dict[str, int]:
        counts = {kind.value: 0 for kind in SourceKind}
        for doc in self.documents:
            counts[doc.source.value] += 1
        return counts

    def document(self, doc_id: str) -> Document:
        doc = self._doc_index().get(doc_id)
        if doc is None:
            raise KeyError(doc_id)
        return doc

    def chunk(self, doc_id: str, seq: int) -> Chunk:
        chunk = self._chunk_index().get((doc_id, seq))
        if chunk is None:
            raise KeyError((doc_id, seq))
        return chunk

    def _doc_index(self) -> dict[str, Document]:
        cached = getattr(self, "_docs_by_id", None)
        if cached is None:
            cached = {doc.id: doc for doc in self.documents}
            object.__setattr__(self, "_docs_by_id", cached)
        return cached

    def _chunk_index(self) -> dict[tuple[str, int], Chunk]:
        cached = getattr(self, "_chunks_by_key", None)
        if cached is None:
            cached = {(c.doc_id, c.seq): c for c in self.chunks}
            object.__setattr__(self, "_chunks_by_key", cached)
        return cached


def build_corpus(documents: Iterable[Document], max_chars: int = DEFAULT_MAX_CHARS, overlap: int = DEFAULT_OVERLAP) -> Corpus:
    ordered = sorted(documents, key=lambda d: d.id)
    seen: set[str] = set()
    for doc in ordered:
        if doc.id in seen:
            raise DuplicateEntry(doc.id)
        seen.add(doc.id)
    chunks: list[Chunk] = []
    for doc in ordered:
        chunks.extend(chunk_document(doc, max_chars=max_chars, overlap=overlap))
    return Corpus(documents=tuple(ordered), chunks=tuple(chunks), max_chars=max_chars, overlap=overlap)


_PARSERS = {
    SourceKind.DICTIONARY: parse_dictionary,
    SourceKind.CHARACTERISTIC_WORDS: parse_characteristic_words,
    SourceKind.GAZETTEER: parse_gazetteer,
    SourceKind.ENCYCLOPEDIA: lambda lines: parse_articles(lines, SourceKind.ENCYCLOPEDIA),
    SourceKind.MOE_KNOWLEDGE_BASE: lambda lines: parse_articles(lines, SourceKind.MOE_KNOWLEDGE_BASE),
}


def ingest_corpus(manifest_path: str | Path) -> Corpus:
    """Parse every source listed in the manifest and return the corpus.

    All-or-nothing: any parser error aborts the whole ingestion (with the
    offending file path attached), so a partial corpus can never leak
    into retrieval.  The same files always yield a byte-identical corpus
    snapshot.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(str(manifest_path))
    parser = configparser.ConfigParser()
    parser.read(manifest_path, encoding="utf-8")
    if not parser.has_section("sources") or not parser.options("sources"):
        raise EmptyManifest(f"{manifest_path}: no [sources] entries")

    max_chars = DEFAULT_MAX_CHARS
    overlap = DEFAULT_OVERLAP
    if parser.has_section("chunking"):
        max_chars = parser.getint("chunking", "max_chars", fallback=DEFAULT_MAX_CHARS)
        overlap = parser.getint("chunking", "overlap", fallback=DEFAULT_OVERLAP)

    documents: list[Document] = []
    for name in parser.options("sources"):
        try:
            kind = SourceKind(name)
        except ValueError:
            raise SchemaMismatch(f"{manifest_path}: unknown source kind {name!r}") from None
        source_path = Path(parser.get("sources", name))
        if not source_path.is_absolute():
            source_path = manifest_path.parent / source_path
        if not source_path.exists():
            raise FileNotFoundError(str(source_path))
        with open(source_path, encoding="utf-8") as handle:
            try:
                documents.extend(_PARSERS[kind](handle))
            except HakkachatError as exc:
                exc.args = (f"{source_path}: {exc}",)
                raise
    return build_corpus(documents, max_chars=max_chars, overlap=overlap)


# --- corpus snapshot section ---------------------------------------------
#
# Layout: magic "CORP", u32 version, u64 payload length, then the payload
# as canonical JSON (sorted keys, no extra whitespace, UTF-8).  Canonical
# ordering of documents/chunks plus canonical JSON makes re-ingestion of
# identical inputs produce byte-identical sections.

CORPUS_MAGIC = b"CORP"
CORPUS_VERSION = 1


def corpus_to_bytes(corpus: Corpus) -> bytes:
    payload = {
        "max_chars": corpus.max_chars,
        "overlap": corpus.overlap,
        "documents": [
            {
                "id": doc.id,
                "source": doc.source.value,
                "title": doc.title,
                "body": doc.body,
                "headword": doc.headword,
                "region": doc.region,
                "metadata": doc.metadata,
            }
            for doc in corpus.documents
        ],
        "chunks": [
            {"doc_id": c.doc_id, "seq": c.seq, "text": c.text, "char_span": list(c.char_span)}
            for c in corpus.chunks
        ],
    }
    encoded = json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return CORPUS_MAGIC + CORPUS_VERSION.to_bytes(4, "little") + len(encoded).to_bytes(8, "little") + encoded


def corpus_from_bytes(raw: bytes) -> Corpus:
    if raw[:4] != CORPUS_MAGIC:
        raise SnapshotFormatError("bad corpus section magic")
    version = int.from_bytes(raw[4:8], "little")
    if version != CORPUS_VERSION:
        raise SnapshotFormatError(f"unsupported corpus section version {version}")
    length = int.from_bytes(raw[8:16], "little")
    payload = raw[16 : 16 + length]
    if len(payload) != length:
        raise SnapshotFormatError("truncated corpus section")
    data = json.loads(payload.decode("utf-8"))
    documents = tuple(
        Document(
            id=entry["id"],
            source=SourceKind(entry["source"]),
            title=entry["title"],
            body=entry["body"],
            headword=entry["headword"],
            region=entry["region"],
            metadata=dict(entry["metadata"]),
        )
        for entry in data["documents"]
    )
    chunks = tuple(
        Chunk(doc_id=entry["doc_id"], seq=entry["seq"], text=entry["text"], char_span=tuple(entry["char_span"]))
        for entry in data["chunks"]
    )
    return Corpus(documents=documents, chunks=chunks, max_chars=data["max_chars"], overlap=data["overlap"])
