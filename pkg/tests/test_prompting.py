from __future__ import annotations

import pytest

from hakkachat.errors import InconsistentBundle, TemplateFormatError
from hakkachat.prompting import (
    PromptTemplate,
    assemble,
    default_template,
    format_template,
    load_template,
    parse_template,
    render,
)
from hakkachat.routing import Rationale, Route, RouteDecision

from conftest import FIXTURES, GOLDEN

CULTURAL = RouteDecision(route=Route.CULTURAL_KB, confidence=0.8, rationale=Rationale.KB_SIMILARITY, top_similarity=0.8)
WEB = RouteDecision(route=Route.WEB_SEARCH, confidence=0.9, rationale=Rationale.FALLBACK, top_similarity=0.1)
TRANSLATION = RouteDecision(route=Route.TRANSLATION, confidence=1.0, rationale=Rationale.PATTERN_MATCH)


def test_default_template_shape():
    template = default_template()
    assert len(template.limitations) == 5
    for field in (
        template.role_preamble,
        template.skill_cultural,
        template.skill_translation,
        template.context_header,
        template.question_header,
    ):
        assert field.strip()
    assert "Hakka" in template.role_preamble


def test_default_template_key_clauses():
    template = default_template()
    joined = "\n".join(template.limitations)
    assert "Hakka characters, not Romanized" in joined
    assert '"HakkaTrans"' in joined and '"Knowledge"' in joined


def test_template_rejects_wrong_clause_count():
    with pytest.raises(TemplateFormatError):
        PromptTemplate(limitations=("a", "b", "c"))


def test_assemble_citation_ids_in_rank_order():
    context = [("encyclopedia", "encyclopedia:a", "甲"), ("gazetteer", "gazetteer:b#x", "乙"), ("web", "https://e", "丙")]
    bundle = assemble(default_template(), CULTURAL, context, None, "問題")
    assert [e.citation_id for e in bundle.retrieved] == ["1", "2", "3"]
    assert [e.text for e in bundle.retrieved] == ["甲", "乙", "丙"]
    assert bundle.dropped_context == 0


def test_assemble_translation_bundle():
    bundle = assemble(default_template(), TRANSLATION, [], "恁仔細", "請翻譯成客語：謝謝")
    assert bundle.translation_result == "恁仔細"
    assert bundle.retrieved == ()


def test_assemble_cultural_without_hits_is_inconsistent():
    with pytest.raises(InconsistentBundle):
        assemble(default_template(), CULTURAL, [], None, "問題")


def test_assemble_translation_without_text_is_inconsistent():
    with pytest.raises(InconsistentBundle):
        assemble(default_template(), TRANSLATION, [], None, "請翻譯")


def test_assemble_translation_with_context_is_inconsistent():
    with pytest.raises(InconsistentBundle):
        assemble(default_template(), TRANSLATION, [("web", "u", "x")], "譯", "請翻譯")


def test_assemble_non_translation_with_translation_is_inconsistent():
    with pytest.raises(InconsistentBundle):
        assemble(default_template(), WEB, [("web", "u", "x")], "譯", "問題")


def test_assemble_budget_drops_whole_lowest_ranked_chunks():
    context = [("encyclopedia", f"encyclopedia:{i}", "字" * 100) for i in range(5)]
    bundle = assemble(default_template(), CULTURAL, context, None, "問", context_budget=250)
    assert len(bundle.retrieved) == 2
    assert bundle.dropped_context == 3
    # surviving entries keep their rank-order ids and full text
    assert [e.citation_id for e in bundle.retrieved] == ["1", "2"]
    assert all(len(e.text) == 100 for e in bundle.retrieved)


def test_assemble_budget_never_drops_top_hit():
    context = [("encyclopedia", "encyclopedia:0", "字" * 500)]
    bundle = assemble(default_template(), CULTURAL, context, None, "問", context_budget=10)
    assert len(bundle.retrieved) == 1
    assert bundle.dropped_context == 0


def test_render_stable_bytes():
    context = [("encyclopedia", "encyclopedia:a", "甲。")]
    bundle = assemble(default_template(), CULTURAL, context, None, "問題")
    assert render(bundle) == render(bundle)


def test_render_contains_each_limitation_once():
    context = [("encyclopedia", "encyclopedia:a", "甲。")]
    text = render(assemble(default_template(), CULTURAL, context, None, "問題"))
    for clause in default_template().limitations:
        assert text.count(clause) == 1


def test_render_skill_section_matches_route():
    cultural = render(assemble(default_template(), CULTURAL, [("encyclopedia", "e:a", "甲")], None, "q"))
    translation = render(assemble(default_template(), TRANSLATION, [], "譯文", "q"))
    assert default_template().skill_cultural in cultural
    assert default_template().skill_translation not in cultural
    assert default_template().skill_translation in translation
    assert default_template().skill_cultural not in translation


def test_render_matches_golden(corpus, index, embedder):
    from hakkachat.vector_index import search_topk

    query = "擂茶是客家代表性的米食飲品嗎"
    hits = search_topk(index, query, k=3, embedder=embedder)
    context = []
    for hit in hits:
        doc = corpus.document(hit.doc_id)
        context.append((doc.source.value, hit.doc_id, corpus.chunk(hit.doc_id, hit.seq).text))
    decision = RouteDecision(
        route=Route.CULTURAL_KB, confidence=0.41, rationale=Rationale.KB_SIMILARITY, top_similarity=0.41
    )
    rendered = render(assemble(default_template(), decision, context, None, query))
    assert rendered == (GOLDEN / "prompt_cultural.txt").read_text(encoding="utf-8")


def test_render_injective_on_fixture_bundles(corpus):
    template = default_template()
    bundles = [
        assemble(template, TRANSLATION, [], "恁仔細", "請翻譯成客語：謝謝"),
        assemble(template, CULTURAL, [("encyclopedia", "e:a", "甲")], None, "q1"),
        assemble(template, CULTURAL, [("encyclopedia", "e:a", "甲"), ("web", "u", "乙")], None, "q1"),
        assemble(template, CULTURAL, [("encyclopedia", "e:a", "甲")], None, "q2"),
        assemble(template, WEB, [("web", "https://e", "丙")], None, "q1"),
    ]
    rendered = [render(b) for b in bundles]
    assert len(set(rendered)) == len(rendered)


def test_template_file_round_trip():
    template = default_template()
    assert parse_template(format_template(template)) == template


def test_shipped_template_file_matches_defaults():
    assert load_template(FIXTURES / "templates" / "default.txt") == default_template()


def test_parse_template_missing_section():
    with pytest.raises(TemplateFormatError):
        parse_template("[role]\nonly a role\n")


def test_parse_template_unnumbered_limitation():
    text = format_template(default_template()).replace("1. Answers", "Answers")
    with pytest.raises(TemplateFormatError):
        parse_template(text)
