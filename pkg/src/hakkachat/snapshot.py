"""Single-file snapshot bundling a corpus with its vector index.

Layout: magic ``HKSNAP01``, u32 version, then two length-prefixed
sections (u64 little-endian lengths): the corpus section and the index
section, each in its own documented format.  Writing the same corpus
and index always produces byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

from .errors import SnapshotFormatError
from .ingest import Corpus, corpus_from_bytes, corpus_to_bytes
from .vector_index import VectorIndex, index_from_bytes, index_to_bytes

SNAPSHOT_MAGIC = b"HKSNAP01"
SNAPSHOT_VERSION = 1


def snapshot_to_bytes(corpus: Corpus, index: VectorIndex) -> bytes:
    corpus_section = corpus_to_bytes(corpus)
    index_section = index_to_bytes(index)
    return (
        SNAPSHOT_MAGIC
        + SNAPSHOT_VERSION.to_bytes(4, "little")
        + len(corpus_section).to_bytes(8, "little")
        + corpus_section
        + len(index_section).to_bytes(8, "little")
        + index_section
    )


def snapshot_from_bytes(raw: bytes) -> tuple[Corpus, VectorIndex]:
    if raw[:8] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError("not a snapshot file (bad magic)")
    version = int.from_bytes(raw[8:12], "little")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    offset = 12
    corpus_len = int.from_bytes(raw[offset : offset + 8], "little")
    offset += 8
    corpus_section = raw[offset : offset + corpus_len]
    if len(corpus_section) != corpus_len:
        raise SnapshotFormatError("truncated corpus section")
    offset += corpus_len
    index_len = int.from_bytes(raw[offset : offset + 8], "little")
    offset += 8
    index_section = raw[offset : offset + index_len]
    if len(index_section) != index_len:
        raise SnapshotFormatError("truncated index section")
    return corpus_from_bytes(corpus_section), index_from_bytes(index_section)


def write_snapshot(path: str | Path, corpus: Corpus, index: VectorIndex) -> None:
    Path(path).write_bytes(snapshot_to_bytes(corpus, index))


def read_snapshot(path: str | Path) -> tuple[Corpus, VectorIndex]:
    return snapshot_from_bytes(Path(path).read_bytes())
