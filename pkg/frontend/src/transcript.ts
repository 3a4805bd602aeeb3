// Transcript rendering: pure functions from fetched session data to DOM.
// Everything shown comes from the envelope; citations keep their server
// order and nothing is fabricated client-side.

import type { Locale } from "./locale.js";
import type { AnswerEnvelope, ChatMessage, SessionTranscript } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function routeBadge(route: AnswerEnvelope["route"], locale: Locale): HTMLElement {
  const badge = el("span", `badge badge--${route}`, locale.routeBadge[route]);
  badge.dataset.route = route;
  return badge;
}

function citationChip(citation: AnswerEnvelope["citations"][number]): HTMLElement {
  const chip = el("div", "citation");
  chip.dataset.citationId = citation.citation_id;

  const head = el("button", "citation__chip");
  head.type = "button";
  head.appendChild(el("span", "citation__id", `[${citation.citation_id}]`));
  head.appendChild(el("span", "citation__kind", citation.source_kind));
  head.appendChild(el("span", "citation__ref", citation.ref));

  const panel = el("div", "citation__panel");
  panel.appendChild(el("div", "citation__quote", citation.quote));
  panel.hidden = true;

  head.addEventListener("click", () => {
    panel.hidden = !panel.hidden;
    chip.classList.toggle("citation--expanded", !panel.hidden);
  });

  chip.appendChild(head);
  chip.appendChild(panel);
  return chip;
}

export function renderEnvelope(envelope: AnswerEnvelope, locale: Locale): HTMLElement {
  const body = el("div", "message__content");

  const meta = el("div", "message__meta");
  meta.appendChild(routeBadge(envelope.route, locale));
  meta.appendChild(el("span", "message__latency", locale.latency(envelope.latency_ms)));
  body.appendChild(meta);

  if (envelope.degraded !== null) {
    const banner = el("div", "message__degraded");
    banner.appendChild(el("strong", "message__degraded-title", locale.degradedTitle));
    banner.appendChild(el("span", "message__degraded-reason", envelope.degraded));
    body.appendChild(banner);
  }

  body.appendChild(el("div", "message__text", envelope.answer));

  if (envelope.citations.length > 0) {
    const citations = el("div", "message__citations");
    citations.appendChild(el("div", "message__citations-label", locale.citationsLabel));
    for (const citation of envelope.citations) {
      citations.appendChild(citationChip(citation));
    }
    body.appendChild(citations);
  }
  return body;
}

export function renderMessage(message: ChatMessage, locale: Locale): HTMLElement {
  const node = el("article", `message message--${message.author}`);
  node.dataset.turn = String(message.turn);
  if (message.author === "assistant" && message.envelope) {
    node.appendChild(renderEnvelope(message.envelope, locale));
  } else {
    node.appendChild(el("div", "message__text", message.text));
  }
  return node;
}

export function renderTranscript(session: SessionTranscript, locale: Locale): HTMLElement {
  const container = el("section", "transcript");
  container.dataset.sessionId = session.session_id;
  if (session.messages.length === 0) {
    container.appendChild(el("p", "transcript__empty", locale.emptyTranscript));
    return container;
  }
  for (const message of session.messages) {
    container.appendChild(renderMessage(message, locale));
  }
  return container;
}
