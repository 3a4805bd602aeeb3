"""Service configuration file handling.

INI-style key-value file.  The ``[service]`` section holds the snapshot
path, routing threshold, fan-outs, context budget, session store path
and listen address; one ``[provider.<name>]`` block per external
dependency selects ``kind = stub | http`` plus its stub fixture or HTTP
endpoint.  Credentials never live in the file: HTTP adapters read them
from environment variables.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidParams
from .prompting import DEFAULT_CONTEXT_BUDGET, PromptTemplate, default_template, load_template
from .providers import (
    DEFAULT_TIMEOUT_MS,
    HttpCompletion,
    HttpTranslator,
    HttpWebSearch,
    StubCompletion,
    StubTranslator,
    StubWebSearch,
)
from .routing import DEFAULT_TAU, TranslationPatterns, load_patterns
from .service import DEFAULT_RETRIEVAL_K, DEFAULT_WEB_RESULTS, ChatService
from .sessions import SessionStore
from .snapshot import read_snapshot

DEFAULT_LISTEN = "127.0.0.1:8099"


@dataclass(frozen=True)
class ProviderBlock:
    kind: str = "stub"
    endpoint: str = ""
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    fixture: str = ""


@dataclass(frozen=True)
class ServiceConfig:
    snapshot: Path
    listen_host: str = "127.0.0.1"
    listen_port: int = 8099
    tau: float = DEFAULT_TAU
    retrieval_k: int = DEFAULT_RETRIEVAL_K
    web_results: int = DEFAULT_WEB_RESULTS
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    session_store: Path | None = None
    template_path: Path | None = None
    patterns_path: Path | None = None
    providers: dict[str, ProviderBlock] = field(default_factory=dict)


def load_service_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise FileNotFoundError(str(path))
    if not parser.has_section("service") or not parser.has_option("service", "snapshot"):
        raise InvalidParams(f"{path}: [service] section with a snapshot path is required")
    base = path.parent

    def resolve(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    listen = parser.get("service", "listen", fallback=DEFAULT_LISTEN)
    host, _, port = listen.partition(":")
    providers: dict[str, ProviderBlock] = {}
    for section in parser.sections():
        if not section.startswith("provider."):
            continue
        name = section[len("provider.") :]
        fixture = parser.get(section, "fixture", fallback=parser.get(section, "lexicon", fallback=""))
        providers[name] = ProviderBlock(
            kind=parser.get(section, "kind", fallback="stub"),
            endpoint=parser.get(section, "endpoint", fallback=""),
            timeout_ms=parser.getint(section, "timeout_ms", fallback=DEFAULT_TIMEOUT_MS),
            fixture=str(resolve(fixture)) if fixture else "",
        )

    session_store = parser.get("service", "session_store", fallback="")
    template = parser.get("service", "template", fallback="")
    patterns = parser.get("service", "patterns", fallback="")
    return ServiceConfig(
        snapshot=resolve(parser.get("service", "snapshot")),
        listen_host=host or "127.0.0.1",
        listen_port=int(port) if port else 8099,
        tau=parser.getfloat("service", "tau", fallback=DEFAULT_TAU),
        retrieval_k=parser.getint("service", "retrieval_k", fallback=DEFAULT_RETRIEVAL_K),
        web_results=parser.getint("service", "web_results", fallback=DEFAULT_WEB_RESULTS),
        context_budget=parser.getint("service", "context_budget", fallback=DEFAULT_CONTEXT_BUDGET),
        session_store=resolve(session_store) if session_store else None,
        template_path=resolve(template) if template else None,
        patterns_path=resolve(patterns) if patterns else None,
        providers=providers,
    )


def _build_translator(block: ProviderBlock):
    if block.kind == "http":
        return HttpTranslator(block.endpoint, timeout_ms=block.timeout_ms)
    if not block.fixture:
        raise InvalidParams("stub translation provider needs a lexicon fixture path")
    return StubTranslator.from_file(block.fixture)


def _build_web_search(block: ProviderBlock):
    if block.kind == "http":
        return HttpWebSearch(block.endpoint, timeout_ms=block.timeout_ms)
    if not block.fixture:
        raise InvalidParams("stub web-search provider needs a fixture path")
    return StubWebSearch.from_file(block.fixture)


def _build_completion(block: ProviderBlock, template: PromptTemplate):
    if block.kind == "http":
        return HttpCompletion(block.endpoint, timeout_ms=block.timeout_ms)
    return StubCompletion(question_marker=template.question_header)


def build_service(config: ServiceConfig) -> ChatService:
    corpus, index = read_snapshot(config.snapshot)
    template = load_template(config.template_path) if config.template_path else default_template()
    patterns = load_patterns(config.patterns_path) if config.patterns_path else TranslationPatterns()
    return ChatService(
        corpus=corpus,
        index=index,
        translator=_build_translator(config.providers.get("translation", ProviderBlock())),
        web_searcher=_build_web_search(config.providers.get("web_search", ProviderBlock())),
        completion=_build_completion(config.providers.get("completion", ProviderBlock()), template),
        store=SessionStore(config.session_store),
        template=template,
        patterns=patterns,
        tau=config.tau,
        retrieval_k=config.retrieval_k,
        web_results=config.web_results,
        context_budget=config.context_budget,
    )
