"""Deterministic hash-based text embedding.

This is the reference embedder the whole offline test surface is built
on: a pure function of (text, dims) with no model dependency.  The text
is normalized, broken into character trigrams (texts shorter than three
characters count as a single token), and each trigram is hashed with
FNV-1a 64-bit.  The hash picks an accumulator bucket (``hash mod dims``)
and a sign (+1 when bit 32 of the hash is 0, else -1); the accumulator
is then L2-normalized.

Real dense retrievers plug in through the same ``Embedder`` protocol via
the providers module; the index records which embedder produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from .errors import DimensionMismatch, EmptyText, InvalidParams, ZeroVector
from .ingest import normalize_text

REFERENCE_EMBEDDER_ID = "fnv1a-trigram-v1"
DEFAULT_DIMS = 256
MIN_DIMS = 8

_FNV64_OFFSET_BASIS = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_UINT64_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class EmbeddingVector:
    dims: int
    values: tuple[float, ...]
    normalized: bool

    def __post_init__(self) -> None:
        if len(self.values) != self.dims:
            raise DimensionMismatch(f"{len(self.values)} values for dims={self.dims}")


def fnv1a_64(data: bytes) -> int:
    h = _FNV64_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * _FNV64_PRIME) & _UINT64_MASK
    return h


def embed_reference(text: str, dims: int = DEFAULT_DIMS) -> EmbeddingVector:
    if dims < MIN_DIMS:
        raise InvalidParams(f"dims must be >= {MIN_DIMS}, got {dims}")
    normalized = normalize_text(text)
    if not normalized.strip():
        raise EmptyText("cannot embed empty text")
    if len(normalized) < 3:
        tokens = [normalized]
    else:
        tokens = [normalized[i : i + 3] for i in range(len(normalized) - 2)]

    accumulator = [0.0] * dims
    for token in tokens:
        h = fnv1a_64(token.encode("utf-8"))
        sign = 1.0 if (h >> 32) & 1 == 0 else -1.0
        accumulator[h % dims] += sign

    norm = math.sqrt(sum(v * v for v in accumulator))
    if norm == 0.0:
        # Only reachable through adversarial sign cancellation; surfaced
        # instead of dividing by zero.
        raise ZeroVector(f"accumulator for {text!r} is all zeros")
    return EmbeddingVector(dims=dims, values=tuple(v / norm for v in accumulator), normalized=True)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity, computed from the full norms so it stays exact
    even for callers that pass unnormalized vectors."""
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims {a.dims} != {b.dims}")
    norm_a = math.sqrt(sum(v * v for v in a.values))
    norm_b = math.sqrt(sum(v * v for v in b.values))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine needs two non-zero vectors")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    return dot / (norm_a * norm_b)


@runtime_checkable
class Embedder(Protocol):
    """Anything that can embed text into a fixed-dimensional vector and
    names itself so indexes can reject mismatched embedders."""

    embedder_id: str

    def embed(self, text: str, dims: int) -> EmbeddingVector: ...


class ReferenceEmbedder:
    embedder_id = REFERENCE_EMBEDDER_ID

    def embed(self, text: str, dims: int = DEFAULT_DIMS) -> EmbeddingVector:
        return embed_reference(text, dims)
