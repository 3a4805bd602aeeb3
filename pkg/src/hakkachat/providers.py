"""External dependency interfaces: translation, web search, and LLM
completion.

Each dependency has a deterministic stub (pure function of input plus a
shipped fixture file) and an HTTP adapter behind the same interface.
The stubs are what the offline test suite runs against; the HTTP
adapters are configured with an endpoint plus env-var credentials and
never fabricate content: transport problems always surface as
``ProviderUnavailable``.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol, runtime_checkable

import httpx

from .errors import (
    ContextTooLong,
    ProviderUnavailable,
    QuotaExceeded,
    UnsupportedDirection,
    UntranslatableInput,
)
from .prompting import DEFAULT_QUESTION_HEADER

DEFAULT_TIMEOUT_MS = 10_000
RETRY_BACKOFF_MS = 500
MAX_SEARCH_RESULTS = 10
STUB_MAX_PROMPT_CHARS = 32_000

_CITATION_TOKEN = re.compile(r"\[(\d+)\]")


class Direction(str, Enum):
    MANDARIN_TO_HAKKA = "mandarin_to_hakka"
    HAKKA_TO_MANDARIN = "hakka_to_mandarin"


@dataclass(frozen=True)
class TranslationJob:
    text: str
    direction: Direction

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise UntranslatableInput("translation input is empty")


@dataclass(frozen=True)
class SearchResult:
    title: str
    url: str
    snippet: str
    rank: int


@dataclass(frozen=True)
class Completion:
    text: str
    provider_id: str
    usage: dict[str, int] | None = None


@runtime_checkable
class Translator(Protocol):
    kind: str

    def translate(self, job: TranslationJob) -> str: ...


@runtime_checkable
class WebSearcher(Protocol):
    kind: str

    def search(self, query: str, n: int) -> list[SearchResult]: ...


@runtime_checkable
class CompletionProvider(Protocol):
    kind: str

    def complete(self, prompt: str) -> Completion: ...


# --- stubs -------------------------------------------------------------


def load_lexicon(path: str | Path) -> dict[str, str]:
    """Read the translation fixture: TSV with ``source`` and ``target``
    columns, Mandarin on the source side."""
    pairs: dict[str, str] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t")[:2] != ["source", "target"]:
        raise ValueError(f"{path}: lexicon needs a 'source\\ttarget' header")
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2 or not fields[0] or not fields[1]:
            raise ValueError(f"{path}: bad lexicon line {line!r}")
        pairs[fields[0]] = fields[1]
    return pairs


class StubTranslator:
    """Longest-match-first lexicon substitution; spans with no lexicon
    entry pass through unchanged, so mixed known/unknown text still
    round-trips on the known parts."""

    kind = "stub"

    def __init__(self, lexicon: dict[str, str]):
        self._forward = dict(lexicon)
        self._backward = {target: source for source, target in lexicon.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "StubTranslator":
        return cls(load_lexicon(path))

    def translate(self, job: TranslationJob) -> str:
        if job.direction is Direction.MANDARIN_TO_HAKKA:
            table = self._forward
        elif job.direction is Direction.HAKKA_TO_MANDARIN:
            table = self._backward
        else:
            raise UnsupportedDirection(str(job.direction))
        keys = sorted(table, key=len, reverse=True)
        out: list[str] = []
        i = 0
        text = job.text
        while i < len(text):
            for key in keys:
                if text.startswith(key, i):
                    out.append(table[key])
                    i += len(key)
                    break
            else:
                out.append(text[i])
                i += 1
        return "".join(out)


class StubWebSearch:
    """Keyword lookup over canned results.

    The fixture is JSONL with fields ``query``, ``title``, ``url``,
    ``snippet``, ``rank``; an entry matches when its query keyword occurs
    in the user query.  Unknown queries return an empty list.
    """

    kind = "stub"

    def __init__(self, entries: list[dict]):
        self._by_keyword: dict[str, list[SearchResult]] = {}
        for entry in entries:
            result = SearchResult(
                title=entry["title"], url=entry["url"], snippet=entry["snippet"], rank=int(entry["rank"])
            )
            self._by_keyword.setdefault(entry["query"], []).append(result)
        for results in self._by_keyword.values():
            results.sort(key=lambda r: r.rank)

    @classmethod
    def from_file(cls, path: str | Path) -> "StubWebSearch":
        entries = [
            json.loads(line)
            for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        return cls(entries)

    def search(self, query: str, n: int) -> list[SearchResult]:
        if not query.strip():
            raise ValueError("query is empty")
        if n < 1 or n > MAX_SEARCH_RESULTS:
            raise ValueError(f"n must be in 1..{MAX_SEARCH_RESULTS}")
        matched: list[SearchResult] = []
        for keyword in sorted(self._by_keyword):
            if keyword in query:
                matched.extend(self._by_keyword[keyword])
        matched.sort(key=lambda r: (r.rank, r.url))
        return [
            SearchResult(title=r.title, url=r.url, snippet=r.snippet, rank=i)
            for i, r in enumerate(matched[:n], start=1)
        ]


class StubCompletion:
    """Canonical deterministic answer: echo the question block, then one
    ``uses [k]`` line per citation id present in the prompt.  Exact
    end-to-end golden tests are built on this contract."""

    kind = "stub"
    provider_id = "stub-completion"

    def __init__(self, question_marker: str = DEFAULT_QUESTION_HEADER, max_prompt_chars: int = STUB_MAX_PROMPT_CHARS):
        self.question_marker = question_marker
        self.max_prompt_chars = max_prompt_chars

    def complete(self, prompt: str) -> Completion:
        if not prompt.strip():
            raise ValueError("prompt is empty")
        if len(prompt) > self.max_prompt_chars:
            raise ContextTooLong(f"prompt has {len(prompt)} chars, stub limit is {self.max_prompt_chars}")
        lines = prompt.splitlines()
        question_lines: list[str] = []
        for i in range(len(lines) - 1, -1, -1):
            if lines[i].strip() == self.question_marker.strip():
                question_lines = [line for line in lines[i + 1 :] if line.strip()]
                break
        if not question_lines:
            question_lines = [lines[-1]] if lines else []
        citation_ids = sorted({int(m) for m in _CITATION_TOKEN.findall(prompt)})
        out_lines = question_lines + [f"uses [{cid}]" for cid in citation_ids]
        return Completion(text="\n".join(out_lines), provider_id=self.provider_id)


class FailingProvider:
    """Test/ops helper that fails every call; used to exercise the
    degrade-don't-fail paths."""

    kind = "down"
    provider_id = "failing"

    def __init__(self, reason: str = "forced failure"):
        self.reason = reason

    def translate(self, job: TranslationJob) -> str:
        raise ProviderUnavailable(self.reason)

    def search(self, query: str, n: int) -> list[SearchResult]:
        raise ProviderUnavailable(self.reason)

    def complete(self, prompt: str) -> Completion:
        raise ProviderUnavailable(self.reason)


# --- HTTP adapters ------------------------------------------------------
#
# Request/response schemas here are this artifact's own (the real
# upstream APIs are not public); they are documented in the README.
# Credentials come from environment variables only.


def _auth_headers(env_var: str) -> dict[str, str]:
    token = os.environ.get(env_var, "")
    return {"Authorization": f"Bearer {token}"} if token else {}


def _post_json(
    client: httpx.Client,
    url: str,
    payload: dict,
    headers: dict[str, str],
    retries: int,
) -> dict:
    last_error: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(RETRY_BACKOFF_MS / 1000.0)
        try:
            response = client.post(url, json=payload, headers=headers)
        except httpx.HTTPError as exc:
            last_error = exc
            continue
        if response.status_code == 429:
            raise QuotaExceeded(f"{url}: quota exceeded")
        if response.status_code >= 500:
            last_error = ProviderUnavailable(f"{url}: HTTP {response.status_code}")
            continue
        if response.status_code >= 400:
            raise ProviderUnavailable(f"{url}: HTTP {response.status_code}")
        return response.json()
    raise ProviderUnavailable(f"{url}: {last_error}")


class HttpTranslator:
    kind = "http"
    CREDENTIAL_ENV = "HAKKACHAT_TRANSLATION_TOKEN"

    def __init__(self, endpoint: str, timeout_ms: int = DEFAULT_TIMEOUT_MS, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self._client = httpx.Client(timeout=timeout_ms / 1000.0, transport=transport)

    def translate(self, job: TranslationJob) -> str:
        payload = {"text": job.text, "direction": job.direction.value}
        data = _post_json(self._client, self.endpoint, payload, _auth_headers(self.CREDENTIAL_ENV), retries=1)
        if "error" in data:
            raise UntranslatableInput(str(data["error"]))
        if not isinstance(data.get("translation"), str) or not data["translation"]:
            raise ProviderUnavailable(f"{self.endpoint}: malformed translation response")
        return data["translation"]


class HttpWebSearch:
    kind = "http"
    CREDENTIAL_ENV = "HAKKACHAT_SEARCH_TOKEN"

    def __init__(self, endpoint: str, timeout_ms: int = DEFAULT_TIMEOUT_MS, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self._client = httpx.Client(timeout=timeout_ms / 1000.0, transport=transport)

    def search(self, query: str, n: int) -> list[SearchResult]:
        payload = {"query": query, "n": n}
        data = _post_json(self._client, self.endpoint, payload, _auth_headers(self.CREDENTIAL_ENV), retries=1)
        results = data.get("results")
        if not isinstance(results, list):
            raise ProviderUnavailable(f"{self.endpoint}: malformed search response")
        return [
            SearchResult(title=str(r["title"]), url=str(r["url"]), snippet=str(r["snippet"]), rank=i)
            for i, r in enumerate(results[:n], start=1)
        ]


class HttpCompletion:
    kind = "http"
    CREDENTIAL_ENV = "HAKKACHAT_COMPLETION_TOKEN"

    def __init__(self, endpoint: str, timeout_ms: int = DEFAULT_TIMEOUT_MS, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.provider_id = f"http:{endpoint}"
        self._client = httpx.Client(timeout=timeout_ms / 1000.0, transport=transport)

    def complete(self, prompt: str) -> Completion:
        payload = {"prompt": prompt}
        # No retry: completion calls are not idempotent and latency is
        # already the main user complaint.
        data = _post_json(self._client, self.endpoint, payload, _auth_headers(self.CREDENTIAL_ENV), retries=0)
        text = data.get("text")
        if not isinstance(text, str) or not text:
            raise ProviderUnavailable(f"{self.endpoint}: empty completion")
        usage = data.get("usage") if isinstance(data.get("usage"), dict) else None
        return Completion(text=text, provider_id=self.provider_id, usage=usage)
