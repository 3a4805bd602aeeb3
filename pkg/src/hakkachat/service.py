"""Per-turn orchestration: route, then retrieve / translate / search,
assemble the prompt, complete, attach citations, persist.

Provider trouble never turns into a failed turn: the service answers
with an honest degraded envelope carrying a machine-readable reason, and
the turn is persisted like any other.
"""

from __future__ import annotations

import logging
import re
import threading
import time

from .embedding import Embedder, ReferenceEmbedder
from .errors import EmptyInput, ProviderError
from .ingest import Corpus
from .prompting import DEFAULT_CONTEXT_BUDGET, ContextEntry, PromptTemplate, assemble, default_template, render
from .providers import CompletionProvider, Direction, TranslationJob, Translator, WebSearcher
from .routing import DEFAULT_TAU, Route, RouteDecision, TranslationPatterns, route_query
from .sessions import AnswerEnvelope, ChatMessage, ChatSession, Citation, SessionStore
from .vector_index import VectorIndex, search_topk

logger = logging.getLogger(__name__)

DEFAULT_RETRIEVAL_K = 4
DEFAULT_WEB_RESULTS = 3
WEB_SOURCE_KIND = "web"

DEGRADED_ANSWER = "抱歉，外部服務暫時無法使用，目前無法完整回答這個問題，請稍後再試。"
HAKKA_ANSWER_HINT = "請以客語漢字回覆。"

_CITATION_TOKEN = re.compile(r"\[(\d+)\]")


class ChatService:
    def __init__(
        self,
        corpus: Corpus,
        index: VectorIndex,
        translator: Translator,
        web_searcher: WebSearcher,
        completion: CompletionProvider,
        store: SessionStore | None = None,
        embedder: Embedder | None = None,
        template: PromptTemplate | None = None,
        patterns: TranslationPatterns | None = None,
        tau: float = DEFAULT_TAU,
        retrieval_k: int = DEFAULT_RETRIEVAL_K,
        web_results: int = DEFAULT_WEB_RESULTS,
        context_budget: int = DEFAULT_CONTEXT_BUDGET,
    ):
        self.corpus = corpus
        self.index = index
        self.translator = translator
        self.web_searcher = web_searcher
        self.completion = completion
        self.store = store if store is not None else SessionStore()
        self.embedder = embedder if embedder is not None else ReferenceEmbedder()
        self.template = template if template is not None else default_template()
        self.patterns = patterns if patterns is not None else TranslationPatterns()
        self.tau = tau
        self.retrieval_k = retrieval_k
        self.web_results = web_results
        self.context_budget = context_budget
        self._provider_status: dict[str, str] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # --- sessions ---------------------------------------------------------

    def create_session(self, answer_in_hakka: bool = False) -> ChatSession:
        return self.store.create_session(answer_in_hakka=answer_in_hakka)

    def get_session(self, session_id: str) -> ChatSession:
        return self.store.get_session(session_id)

    def list_sessions(self, offset: int = 0, limit: int = 50):
        return self.store.list_sessions(offset=offset, limit=limit)

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._session_locks.get(session_id)
            if lock is None:
                lock = threading.Lock()
                self._session_locks[session_id] = lock
            return lock

    # --- routing ------------------------------------------------------------

    def preview_route(self, text: str, tau: float | None = None) -> RouteDecision:
        if not text.strip():
            raise EmptyInput("cannot route empty text")
        return route_query(
            text,
            self.index,
            self.embedder,
            tau=self.tau if tau is None else tau,
            patterns=self.patterns,
        )

    # --- turns ---------------------------------------------------------------

    def handle_turn(self, session_id: str | None, user_text: str) -> AnswerEnvelope:
        """Run one full turn and persist both messages.

        ``session_id=None`` starts a fresh session; an unknown non-empty
        id is rejected (ids are server-minted and unguessable).
        """
        text = user_text.strip()
        if not text:
            raise EmptyInput("turn text is empty")
        session = self.store.create_session() if session_id is None else self.store.get_session(session_id)

        # Turns within one session are serialized; distinct sessions run
        # in parallel.
        with self._session_lock(session.session_id):
            started = time.perf_counter()
            decision = self.preview_route(text)
            envelope = self._answer(decision, text, session, started)
            turn_base = len(session.messages)
            self.store.append_turn(
                session.session_id,
                ChatMessage(turn=turn_base, author="user", text=text),
                ChatMessage(turn=turn_base + 1, author="assistant", text=envelope.answer, envelope=envelope),
            )
            return envelope

    def _answer(self, decision: RouteDecision, text: str, session: ChatSession, started: float) -> AnswerEnvelope:
        hint = HAKKA_ANSWER_HINT if session.answer_in_hakka else None
        try:
            if decision.route is Route.TRANSLATION:
                translation = self.translator.translate(TranslationJob(text=text, direction=Direction.MANDARIN_TO_HAKKA))
                self._mark_provider("translation", ok=True)
                bundle = assemble(self.template, decision, context=[], translation=translation, query=text,
                                  context_budget=self.context_budget, answer_language_hint=hint)
            elif decision.route is Route.CULTURAL_KB:
                hits = search_topk(self.index, text, k=self.retrieval_k, embedder=self.embedder)
                context = []
                for hit in hits:
                    chunk = self.corpus.chunk(hit.doc_id, hit.seq)
                    doc = self.corpus.document(hit.doc_id)
                    context.append((doc.source.value, hit.doc_id, chunk.text))
                bundle = assemble(self.template, decision, context=context, translation=None, query=text,
                                  context_budget=self.context_budget, answer_language_hint=hint)
            else:
                results = self.web_searcher.search(text, n=self.web_results)
                self._mark_provider("web_search", ok=True)
                if not results:
                    return self._degraded(decision, started, "web_search:no_results")
                context = [(WEB_SOURCE_KIND, r.url, f"{r.title}\n{r.snippet}") for r in results]
                bundle = assemble(self.template, decision, context=context, translation=None, query=text,
                                  context_budget=self.context_budget, answer_language_hint=hint)
        except ProviderError as exc:
            provider = "translation" if decision.route is Route.TRANSLATION else "web_search"
            self._mark_provider(provider, ok=False)
            logger.warning("%s provider failed: %s", provider, exc)
            return self._degraded(decision, started, f"{provider}:unavailable")

        prompt = render(bundle)
        try:
            completion = self.completion.complete(prompt)
            self._mark_provider("completion", ok=True)
        except ProviderError as exc:
            self._mark_provider("completion", ok=False)
            logger.warning("completion provider failed: %s", exc)
            return self._degraded(decision, started, "completion:unavailable")

        answer, citations = self._attach_citations(completion.text, bundle.retrieved)
        return AnswerEnvelope(
            answer=answer,
            route=decision.route,
            citations=citations,
            latency_ms=self._elapsed_ms(started),
        )

    def _degraded(self, decision: RouteDecision, started: float, reason: str) -> AnswerEnvelope:
        return AnswerEnvelope(
            answer=DEGRADED_ANSWER,
            route=decision.route,
            citations=(),
            latency_ms=self._elapsed_ms(started),
            degraded=reason,
        )

    @staticmethod
    def _elapsed_ms(started: float) -> int:
        return max(0, int((time.perf_counter() - started) * 1000))

    @staticmethod
    def _attach_citations(answer_text: str, entries: tuple[ContextEntry, ...]) -> tuple[str, tuple[Citation, ...]]:
        """Keep the citations the answer actually uses and drop citation
        tokens that never appeared in the prompt, so a persisted answer
        can never dangle."""
        known = {entry.citation_id for entry in entries}
        cited = set(_CITATION_TOKEN.findall(answer_text))
        cleaned = _CITATION_TOKEN.sub(lambda m: m.group(0) if m.group(1) in known else "", answer_text)
        citations = tuple(
            Citation(citation_id=e.citation_id, source_kind=e.source_kind, ref=e.ref, quote=e.text)
            for e in entries
            if e.citation_id in cited
        )
        return cleaned, citations

    # --- health ------------------------------------------------------------

    def _mark_provider(self, name: str, ok: bool) -> None:
        if ok:
            self._provider_status.pop(name, None)
        else:
            self._provider_status[name] = "down"

    def _provider_state(self, name: str, provider) -> str:
        forced = self._provider_status.get(name)
        if forced:
            return forced
        kind = getattr(provider, "kind", "http")
        return "stub" if kind == "stub" else ("down" if kind == "down" else "up")

    def health(self) -> dict:
        return {
            "status": "ok",
            "corpus_stats": self.corpus.stats(),
            "providers": {
                "translation": self._provider_state("translation", self.translator),
                "web_search": self._provider_state("web_search", self.web_searcher),
                "completion": self._provider_state("completion", self.completion),
            },
        }
