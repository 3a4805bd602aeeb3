"""Three-way query dispatch: translation, cultural knowledge base, or
web search.

The cascade is rule-then-retrieve: explicit translation triggers win
outright; otherwise the query is scored against the knowledge base and
sent to the cultural route when the top similarity clears a threshold,
falling back to web search below it.  Every non-empty query gets exactly
one route.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .embedding import Embedder
from .errors import EmptyInput
from .vector_index import VectorIndex, search_topk

DEFAULT_TAU = 0.25

# Hakka and Mandarin share Han script, so "the user typed Hakka" has no
# reliable detector; these literal triggers plus the command prefixes
# approximate the translation intent.  Operators can replace the set via
# a pattern file.
DEFAULT_SUBSTRING_PATTERNS = (
    "翻譯",
    "客語怎麼說",
    "怎麼講",
    "translate",
    "in hakka",
)
DEFAULT_PREFIX_PATTERNS = ("翻:", "tr:")


class Route(str, Enum):
    TRANSLATION = "translation"
    CULTURAL_KB = "cultural_kb"
    WEB_SEARCH = "web_search"


class Rationale(str, Enum):
    PATTERN_MATCH = "pattern_match"
    KB_SIMILARITY = "kb_similarity"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class RouteDecision:
    route: Route
    confidence: float
    rationale: Rationale
    top_similarity: float | None = None


@dataclass(frozen=True)
class TranslationPatterns:
    substrings: tuple[str, ...] = DEFAULT_SUBSTRING_PATTERNS
    prefixes: tuple[str, ...] = DEFAULT_PREFIX_PATTERNS

    def matches(self, query: str) -> bool:
        lowered = query.lower()
        if any(pattern.lower() in lowered for pattern in self.substrings):
            return True
        leading = lowered.lstrip()
        return any(leading.startswith(prefix.lower()) for prefix in self.prefixes)


def load_patterns(path: str | Path) -> TranslationPatterns:
    """Read a pattern file: one pattern per line, ``#`` comments, plain
    lines are literal substrings, ``prefix:<token>`` lines are leading
    command prefixes."""
    substrings: list[str] = []
    prefixes: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("prefix:"):
            prefixes.append(stripped[len("prefix:") :])
        else:
            substrings.append(stripped)
    return TranslationPatterns(substrings=tuple(substrings), prefixes=tuple(prefixes))


def detect_translation_intent(query: str, patterns: TranslationPatterns | None = None) -> bool:
    if not query.strip():
        raise EmptyInput("query is empty")
    return (patterns or TranslationPatterns()).matches(query)


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def route_query(
    query: str,
    index: VectorIndex,
    embedder: Embedder,
    tau: float = DEFAULT_TAU,
    patterns: TranslationPatterns | None = None,
) -> RouteDecision:
    """Total dispatch: always returns a decision for a non-empty query;
    only index/embedder failures propagate."""
    if detect_translation_intent(query, patterns):
        return RouteDecision(route=Route.TRANSLATION, confidence=1.0, rationale=Rationale.PATTERN_MATCH)
    top = search_topk(index, query, k=1, embedder=embedder)
    top_score = top[0].score
    if top_score >= tau:
        return RouteDecision(
            route=Route.CULTURAL_KB,
            confidence=_clamp01(top_score),
            rationale=Rationale.KB_SIMILARITY,
            top_similarity=top_score,
        )
    return RouteDecision(
        route=Route.WEB_SEARCH,
        confidence=_clamp01(1.0 - top_score),
        rationale=Rationale.FALLBACK,
        top_similarity=top_score,
    )
