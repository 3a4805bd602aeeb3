from __future__ import annotations

from pathlib import Path

import pytest

from hakkachat.embedding import ReferenceEmbedder
from hakkachat.ingest import Corpus, ingest_corpus
from hakkachat.providers import StubCompletion, StubTranslator, StubWebSearch
from hakkachat.service import ChatService
from hakkachat.sessions import SessionStore
from hakkachat.vector_index import VectorIndex, build_index

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

INDEX_DIMS = 256


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def corpus() -> Corpus:
    return ingest_corpus(FIXTURES / "corpus" / "manifest.ini")


@pytest.fixture(scope="session")
def embedder() -> ReferenceEmbedder:
    return ReferenceEmbedder()


@pytest.fixture(scope="session")
def index(corpus, embedder) -> VectorIndex:
    return build_index(corpus, embedder, dims=INDEX_DIMS)


@pytest.fixture()
def stub_translator() -> StubTranslator:
    return StubTranslator.from_file(FIXTURES / "providers" / "lexicon.tsv")


@pytest.fixture()
def stub_web_search() -> StubWebSearch:
    return StubWebSearch.from_file(FIXTURES / "providers" / "web_search.jsonl")


@pytest.fixture()
def service(corpus, index, embedder, stub_translator, stub_web_search) -> ChatService:
    return ChatService(
        corpus=corpus,
        index=index,
        translator=stub_translator,
        web_searcher=stub_web_search,
        completion=StubCompletion(),
        store=SessionStore(),
        embedder=embedder,
    )
