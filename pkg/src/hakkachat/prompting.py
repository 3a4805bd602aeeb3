"""Prompt template and per-turn prompt assembly.

The template is data, not code: six fields (role preamble, the two skill
descriptions, exactly five limitation clauses, context header, question
header) shipped with defaults and overridable through a sectioned text
file so operators can localize without rebuilding.  Assembly is a pure
function of (template, route decision, retrieved context, translation
output, user query) and rendering produces stable bytes for identical
bundles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import InconsistentBundle, TemplateFormatError
from .routing import Route, RouteDecision

DEFAULT_CONTEXT_BUDGET = 4000

ROLE_MARKER = "## Role"
SKILL_CULTURAL_MARKER = "## Skill 1 (Inquiries into Taiwanese Hakka Culture)"
SKILL_TRANSLATION_MARKER = "## Skill 2 (Mandarin to Hakka Translation)"
LIMITATIONS_MARKER = "## Limitations"
TRANSLATION_LABEL = "譯文："

DEFAULT_ROLE = (
    "You will be conversing with an expert in the Hakka language and culture, "
    "proficient and willing to communicate in Traditional Chinese."
)
DEFAULT_SKILL_CULTURAL = (
    'This expert can provide answers using the "Knowledge" resources, including the '
    "Hakka dictionary, the Ministry of Education's Hakka Knowledge Database, the Hakka "
    "Cultural Encyclopedia, Hakka Characteristic Words, and key Hakka towns and "
    "townships, answering questions primarily within the Taiwanese Hakka context."
)
DEFAULT_SKILL_TRANSLATION = (
    "When a user inputs Hakka or is preparing to translate Mandarin into Hakka, the "
    "system is called to execute the translation process. The Hakka translation system "
    "is utilized to convert entire Mandarin queries into Hakka."
)
DEFAULT_LIMITATIONS = (
    "Answers are provided solely based on the user's questions. No prompts are provided.",
    "Data is returned following the aforementioned format.",
    "Tasks are limited to those related to the Hakka dictionary, the Ministry of "
    "Education's Hakka Knowledge Database, Hakka Cultural Encyclopedia, Hakka "
    "Characteristic Words, and key Hakka towns and townships.",
    "The expert specializes in language translation, particularly from Mandarin to "
    "Hakka. If your question falls outside of this scope, an appropriate response may "
    "not be provided.",
    "Responses should be in Hakka characters, not Romanized phonetics. No additional "
    "reference information is to be provided. The expert's translation knowledge is "
    'limited to data provided by "HakkaTrans" and "Knowledge".',
)
DEFAULT_CONTEXT_HEADER = "## Context"
DEFAULT_QUESTION_HEADER = "## Question"


@dataclass(frozen=True)
class PromptTemplate:
    role_preamble: str = DEFAULT_ROLE
    skill_cultural: str = DEFAULT_SKILL_CULTURAL
    skill_translation: str = DEFAULT_SKILL_TRANSLATION
    limitations: tuple[str, ...] = DEFAULT_LIMITATIONS
    context_header: str = DEFAULT_CONTEXT_HEADER
    question_header: str = DEFAULT_QUESTION_HEADER

    def __post_init__(self) -> None:
        if len(self.limitations) != 5:
            raise TemplateFormatError(f"need exactly 5 limitation clauses, got {len(self.limitations)}")
        for name in ("role_preamble", "skill_cultural", "skill_translation", "context_header", "question_header"):
            if not getattr(self, name).strip():
                raise TemplateFormatError(f"template field {name!r} is empty")
        if any(not clause.strip() for clause in self.limitations):
            raise TemplateFormatError("limitation clauses must be non-empty")


def default_template() -> PromptTemplate:
    return PromptTemplate()


@dataclass(frozen=True)
class ContextEntry:
    """One numbered context block: citation id, the source kind shown to
    the model, the underlying reference (doc id or URL), and the quoted
    text."""

    citation_id: str
    source_kind: str
    ref: str
    text: str


@dataclass(frozen=True)
class PromptBundle:
    template: PromptTemplate
    route: Route
    user_query: str
    retrieved: tuple[ContextEntry, ...] = ()
    translation_result: str | None = None
    answer_language_hint: str | None = None
    dropped_context: int = 0


def assemble(
    template: PromptTemplate,
    decision: RouteDecision,
    context: Sequence[tuple[str, str, str]],
    translation: str | None,
    query: str,
    context_budget: int = DEFAULT_CONTEXT_BUDGET,
    answer_language_hint: str | None = None,
) -> PromptBundle:
    """Build the per-turn bundle.

    ``context`` is (source kind, ref, text) in hit-rank order; entries
    get citation ids "1".."n".  When the combined context text exceeds
    the budget, whole lowest-ranked entries are dropped (never the top
    hit, and never a mid-text truncation) and the drop count is kept on
    the bundle.
    """
    route = decision.route
    if route is Route.TRANSLATION:
        if not translation or not translation.strip():
            raise InconsistentBundle("translation route needs a translation result")
        if context:
            raise InconsistentBundle("translation route must not carry retrieved context")
    else:
        if translation is not None:
            raise InconsistentBundle(f"{route.value} route must not carry a translation result")
        if not context:
            raise InconsistentBundle(f"{route.value} route needs retrieved context")

    kept = list(context)
    dropped = 0
    while len(kept) > 1 and sum(len(text) for _, _, text in kept) > context_budget:
        kept.pop()
        dropped += 1
    entries = tuple(
        ContextEntry(citation_id=str(i), source_kind=kind, ref=ref, text=text)
        for i, (kind, ref, text) in enumerate(kept, start=1)
    )
    return PromptBundle(
        template=template,
        route=route,
        user_query=query,
        retrieved=entries,
        translation_result=translation,
        answer_language_hint=answer_language_hint,
        dropped_context=dropped,
    )


def render(bundle: PromptBundle) -> str:
    """Serialize a bundle to the prompt text sent to the completion
    provider.  Layout is fixed; identical bundles render to identical
    bytes."""
    template = bundle.template
    parts: list[str] = [f"{ROLE_MARKER}\n{template.role_preamble}"]

    if bundle.route is Route.TRANSLATION:
        parts.append(f"{SKILL_TRANSLATION_MARKER}\n{template.skill_translation}")
    else:
        parts.append(f"{SKILL_CULTURAL_MARKER}\n{template.skill_cultural}")

    numbered = "\n".join(f"{i}. {clause}" for i, clause in enumerate(template.limitations, start=1))
    parts.append(f"{LIMITATIONS_MARKER}\n{numbered}")

    if bundle.retrieved:
        blocks = "\n".join(
            f"[{entry.citation_id}] ({entry.source_kind}) {entry.text}" for entry in bundle.retrieved
        )
        parts.append(f"{template.context_header}\n{blocks}")

    question_lines = [bundle.user_query]
    if bundle.translation_result is not None:
        question_lines.append(f"{TRANSLATION_LABEL}{bundle.translation_result}")
    if bundle.answer_language_hint:
        question_lines.append(bundle.answer_language_hint)
    parts.append(f"{template.question_header}\n" + "\n".join(question_lines))

    return "\n\n".join(parts) + "\n"


# --- template file ---------------------------------------------------------
#
# Sectioned text mirroring the six fields:
#
#   [role]
#   ...free text...
#   [skill_cultural]
#   ...
#   [skill_translation]
#   ...
#   [limitations]
#   1. first clause
#   ...
#   5. fifth clause
#   [context_header]
#   ...
#   [question_header]
#   ...

_SECTION_LINE = re.compile(r"^\[([a-z_]+)\]$")
_NUMBERED_CLAUSE = re.compile(r"^\d+\.\s*(.*)$")
_SECTION_NAMES = ("role", "skill_cultural", "skill_translation", "limitations", "context_header", "question_header")


def parse_template(text: str) -> PromptTemplate:
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        match = _SECTION_LINE.match(line.strip())
        if match:
            current = match.group(1)
            if current not in _SECTION_NAMES:
                raise TemplateFormatError(f"unknown template section [{current}]")
            sections[current] = []
            continue
        if current is not None:
            sections[current].append(line)
    missing = [name for name in _SECTION_NAMES if name not in sections]
    if missing:
        raise TemplateFormatError(f"template missing section(s): {', '.join(missing)}")

    def body(name: str) -> str:
        return "\n".join(sections[name]).strip()

    clauses: list[str] = []
    for line in sections["limitations"]:
        stripped = line.strip()
        if not stripped:
            continue
        match = _NUMBERED_CLAUSE.match(stripped)
        if not match:
            raise TemplateFormatError(f"limitation lines must be numbered: {stripped!r}")
        clauses.append(match.group(1))
    return PromptTemplate(
        role_preamble=body("role"),
        skill_cultural=body("skill_cultural"),
        skill_translation=body("skill_translation"),
        limitations=tuple(clauses),
        context_header=body("context_header"),
        question_header=body("question_header"),
    )


def load_template(path: str | Path) -> PromptTemplate:
    return parse_template(Path(path).read_text(encoding="utf-8"))


def format_template(template: PromptTemplate) -> str:
    clauses = "\n".join(f"{i}. {clause}" for i, clause in enumerate(template.limitations, start=1))
    return (
        f"[role]\n{template.role_preamble}\n\n"
        f"[skill_cultural]\n{template.skill_cultural}\n\n"
        f"[skill_translation]\n{template.skill_translation}\n\n"
        f"[limitations]\n{clauses}\n\n"
        f"[context_header]\n{template.context_header}\n\n"
        f"[question_header]\n{template.question_header}\n"
    )
