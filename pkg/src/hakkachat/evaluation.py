"""Desk-scale evaluation tooling: SUS questionnaire scoring and the
routing/retrieval quality gates over labeled fixture files.

SUS scoring follows the standard instrument: ten items on a 1..5 scale,
odd items contribute ``item - 1``, even items contribute ``5 - item``,
and the summed contributions are scaled by 2.5 onto 0..100.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .embedding import Embedder
from .errors import EmptyInput, FixtureMismatch, InvalidItem
from .ingest import Corpus
from .routing import Route, TranslationPatterns, route_query
from .vector_index import VectorIndex, search_topk

SUS_ITEM_COUNT = 10


@dataclass(frozen=True)
class SusResponse:
    respondent_id: str
    items: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.items) != SUS_ITEM_COUNT:
            raise InvalidItem(f"{self.respondent_id}: need {SUS_ITEM_COUNT} items, got {len(self.items)}")
        for value in self.items:
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise InvalidItem(f"{self.respondent_id}: item value {value!r} outside 1..5")


@dataclass(frozen=True)
class SusReport:
    n: int
    mean: float
    stddev: float
    scores: tuple[float, ...]
    label: str = "Phase I"

    def display(self) -> str:
        return f"{self.label} SUS Score {self.mean:.2f}"

    def to_dict(self) -> dict:
        return {
            "schema_version": "sus-report-v1",
            "label": self.label,
            "n": self.n,
            "mean": self.mean,
            "stddev": self.stddev,
            "scores": list(self.scores),
            "display": self.display(),
        }


def sus_score(response: SusResponse) -> float:
    total = 0
    for position, value in enumerate(response.items, start=1):
        total += (value - 1) if position % 2 == 1 else (5 - value)
    return total * 2.5


def sus_aggregate(responses: list[SusResponse], label: str = "Phase I") -> SusReport:
    if not responses:
        raise EmptyInput("no SUS responses to aggregate")
    scores = tuple(sus_score(r) for r in responses)
    mean = sum(scores) / len(scores)
    # Population standard deviation: a single respondent has spread 0.
    stddev = math.sqrt(sum((s - mean) ** 2 for s in scores) / len(scores))
    return SusReport(n=len(scores), mean=mean, stddev=stddev, scores=scores, label=label)


def load_sus_responses(path: str | Path) -> list[SusResponse]:
    """CSV with header ``respondent_id,q1..q10``."""
    responses = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        expected = ["respondent_id"] + [f"q{i}" for i in range(1, 11)]
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != expected:
            raise InvalidItem(f"{path}: header must be {','.join(expected)}")
        for row in reader:
            try:
                items = tuple(int(row[f"q{i}"]) for i in range(1, 11))
            except (TypeError, ValueError) as exc:
                raise InvalidItem(f"{path}: non-integer item for {row.get('respondent_id')}") from exc
            responses.append(SusResponse(respondent_id=row["respondent_id"], items=items))
    return responses


# --- routing accuracy -------------------------------------------------------


@dataclass(frozen=True)
class RoutingCase:
    query: str
    expected: Route


def load_routing_fixture(path: str | Path) -> list[RoutingCase]:
    """TSV with header ``query\texpected``."""
    cases = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t")[:2] != ["query", "expected"]:
        raise FixtureMismatch(f"{path}: routing fixture needs a 'query\\texpected' header")
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise FixtureMismatch(f"{path}: bad routing fixture line {line!r}")
        cases.append(RoutingCase(query=fields[0], expected=Route(fields[1])))
    if not cases:
        raise FixtureMismatch(f"{path}: routing fixture has no cases")
    return cases


def routing_accuracy(
    cases: list[RoutingCase],
    index: VectorIndex,
    embedder: Embedder,
    tau: float,
    patterns: TranslationPatterns | None = None,
) -> dict:
    if not cases:
        raise FixtureMismatch("routing fixture has no cases")
    confusion: dict[str, dict[str, int]] = {r.value: {p.value: 0 for p in Route} for r in Route}
    correct = 0
    for case in cases:
        decision = route_query(case.query, index, embedder, tau=tau, patterns=patterns)
        confusion[case.expected.value][decision.route.value] += 1
        if decision.route is case.expected:
            correct += 1
    return {
        "schema_version": "routing-accuracy-v1",
        "total": len(cases),
        "correct": correct,
        "accuracy": correct / len(cases),
        "tau": tau,
        "confusion": confusion,
    }


# --- recall at k -------------------------------------------------------------


@dataclass(frozen=True)
class RetrievalCase:
    query: str
    doc_id: str
    k: int


def load_retrieval_fixture(path: str | Path) -> list[RetrievalCase]:
    """TSV with header ``query\tdoc_id\tk``."""
    cases = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t")[:3] != ["query", "doc_id", "k"]:
        raise FixtureMismatch(f"{path}: retrieval fixture needs a 'query\\tdoc_id\\tk' header")
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise FixtureMismatch(f"{path}: bad retrieval fixture line {line!r}")
        cases.append(RetrievalCase(query=fields[0], doc_id=fields[1], k=int(fields[2])))
    if not cases:
        raise FixtureMismatch(f"{path}: retrieval fixture has no cases")
    return cases


def recall_at_k(cases: list[RetrievalCase], corpus: Corpus, index: VectorIndex, embedder: Embedder) -> dict:
    if not cases:
        raise FixtureMismatch("retrieval fixture has no cases")
    known_ids = {doc.id for doc in corpus.documents}
    hits = 0
    misses = []
    for case in cases:
        if case.doc_id not in known_ids:
            raise FixtureMismatch(f"fixture doc_id {case.doc_id!r} not in corpus")
        top = search_topk(index, case.query, k=case.k, embedder=embedder)
        if any(hit.doc_id == case.doc_id for hit in top):
            hits += 1
        else:
            misses.append(case.query)
    return {
        "schema_version": "recall-report-v1",
        "total": len(cases),
        "hits": hits,
        "recall": hits / len(cases),
        "missed_queries": misses,
    }


def dump_report(report: dict, out: str | Path | None = None) -> str:
    text = json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True)
    if out is not None:
        Path(out).write_text(text + "\n", encoding="utf-8")
    return text
