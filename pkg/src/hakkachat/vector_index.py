"""Exact dense vector index over corpus chunks.

The corpus here is five curated sources, small by construction, so the
index is a brute-force cosine scan: every query scores every entry and
results are fully deterministic (ties broken by canonical chunk order).
No approximate structure, on purpose.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .embedding import Embedder, EmbeddingVector, cosine
from .errors import EmbedderMismatch, EmptyCorpus, HakkachatError, SnapshotFormatError
from .ingest import Corpus

INDEX_MAGIC = b"VIDX"
INDEX_VERSION = 1


@dataclass(frozen=True)
class IndexEntry:
    doc_id: str
    seq: int
    vector: EmbeddingVector


@dataclass(frozen=True)
class RetrievalHit:
    doc_id: str
    seq: int
    score: float
    rank: int


@dataclass(frozen=True)
class VectorIndex:
    dims: int
    embedder_id: str
    entries: tuple[IndexEntry, ...]


def build_index(corpus: Corpus, embedder: Embedder, dims: int) -> VectorIndex:
    """Embed every chunk in canonical (doc_id, seq) order.

    Embedder failures are re-raised with the offending chunk attached so
    a bad source row is findable.
    """
    if not corpus.chunks:
        raise EmptyCorpus("corpus has no chunks to index")
    entries = []
    for chunk in corpus.chunks:
        try:
            vector = embedder.embed(chunk.text, dims)
        except HakkachatError as exc:
            exc.args = (f"chunk ({chunk.doc_id}, {chunk.seq}): {exc}",)
            raise
        entries.append(IndexEntry(doc_id=chunk.doc_id, seq=chunk.seq, vector=vector))
    return VectorIndex(dims=dims, embedder_id=embedder.embedder_id, entries=tuple(entries))


def search_topk(index: VectorIndex, query: str, k: int, embedder: Embedder) -> list[RetrievalHit]:
    """Exact top-k by cosine, ties broken by canonical chunk order."""
    if embedder.embedder_id != index.embedder_id:
        raise EmbedderMismatch(f"index built with {index.embedder_id!r}, queried with {embedder.embedder_id!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    query_vector = embedder.embed(query, index.dims)
    scored = [
        (cosine(query_vector, entry.vector), entry.doc_id, entry.seq)
        for entry in index.entries
    ]
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    return [
        RetrievalHit(doc_id=doc_id, seq=seq, score=score, rank=rank)
        for rank, (score, doc_id, seq) in enumerate(scored[:k], start=1)
    ]


# --- index snapshot section ------------------------------------------------
#
# Layout (little-endian throughout):
#   magic "VIDX", u32 version, u32 dims,
#   u16 embedder-id length + UTF-8 bytes,
#   u32 entry count, then per entry:
#     u16 doc-id length + UTF-8 bytes, u32 seq, dims x f64 vector values.
# Float64 little-endian values make the file bit-exact across platforms.


def index_to_bytes(index: VectorIndex) -> bytes:
    out = bytearray()
    out += INDEX_MAGIC
    out += struct.pack("<II", INDEX_VERSION, index.dims)
    embedder_id = index.embedder_id.encode("utf-8")
    out += struct.pack("<H", len(embedder_id)) + embedder_id
    out += struct.pack("<I", len(index.entries))
    for entry in index.entries:
        doc_id = entry.doc_id.encode("utf-8")
        out += struct.pack("<H", len(doc_id)) + doc_id
        out += struct.pack("<I", entry.seq)
        out += struct.pack(f"<{index.dims}d", *entry.vector.values)
    return bytes(out)


def index_from_bytes(raw: bytes) -> VectorIndex:
    if raw[:4] != INDEX_MAGIC:
        raise SnapshotFormatError("bad index section magic")
    offset = 4
    version, dims = struct.unpack_from("<II", raw, offset)
    offset += 8
    if version != INDEX_VERSION:
        raise SnapshotFormatError(f"unsupported index section version {version}")
    (id_len,) = struct.unpack_from("<H", raw, offset)
    offset += 2
    embedder_id = raw[offset : offset + id_len].decode("utf-8")
    offset += id_len
    (count,) = struct.unpack_from("<I", raw, offset)
    offset += 4
    entries = []
    try:
        for _ in range(count):
            (doc_len,) = struct.unpack_from("<H", raw, offset)
            offset += 2
            doc_id = raw[offset : offset + doc_len].decode("utf-8")
            offset += doc_len
            (seq,) = struct.unpack_from("<I", raw, offset)
            offset += 4
            values = struct.unpack_from(f"<{dims}d", raw, offset)
            offset += 8 * dims
            entries.append(
                IndexEntry(doc_id=doc_id, seq=seq, vector=EmbeddingVector(dims=dims, values=values, normalized=True))
            )
    except struct.error as exc:
        raise SnapshotFormatError(f"truncated index section: {exc}") from exc
    return VectorIndex(dims=dims, embedder_id=embedder_id, entries=tuple(entries))
