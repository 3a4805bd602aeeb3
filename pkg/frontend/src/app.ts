// Main chat controller: session lifecycle, turn sending with optimistic
// render + pending indicator, degraded banners, and the live route
// preview. One in-flight turn at a time; a failed send leaves a retry
// affordance instead of dropping the turn.

import { ApiClient, UnknownSessionError } from "./api.js";
import type { Locale } from "./locale.js";
import { renderEnvelope, renderMessage, renderTranscript, routeBadge } from "./transcript.js";
import { RoutePreview } from "./preview.js";
import type { ChatMessage, RouteDecision } from "./types.js";

export class ChatApp {
  private root: HTMLElement;
  private transcriptHost: HTMLDivElement;
  private previewHost: HTMLDivElement;
  private noticeHost: HTMLDivElement;
  private input: HTMLTextAreaElement;
  private sendButton: HTMLButtonElement;
  private resumeInput: HTMLInputElement;

  private sessionId: string | null = null;
  private pending = false;
  private preview: RoutePreview;

  constructor(
    container: HTMLElement,
    private client: ApiClient,
    private locale: Locale,
    previewDebounceMs = 250,
  ) {
    this.root = document.createElement("div");
    this.root.className = "app";

    const header = document.createElement("header");
    header.className = "app__header";
    const title = document.createElement("h1");
    title.className = "app__title";
    title.textContent = locale.appTitle;
    header.appendChild(title);

    const controls = document.createElement("div");
    controls.className = "app__controls";
    const newChat = document.createElement("button");
    newChat.type = "button";
    newChat.id = "new-chat";
    newChat.textContent = locale.newChat;
    newChat.addEventListener("click", () => void this.newSession());
    controls.appendChild(newChat);

    this.resumeInput = document.createElement("input");
    this.resumeInput.id = "resume-input";
    this.resumeInput.placeholder = locale.resumePlaceholder;
    controls.appendChild(this.resumeInput);
    const resumeButton = document.createElement("button");
    resumeButton.type = "button";
    resumeButton.id = "resume-button";
    resumeButton.textContent = locale.resumeButton;
    resumeButton.addEventListener("click", () => void this.resume(this.resumeInput.value.trim()));
    controls.appendChild(resumeButton);
    header.appendChild(controls);
    this.root.appendChild(header);

    this.noticeHost = document.createElement("div");
    this.noticeHost.className = "app__notice";
    this.noticeHost.hidden = true;
    this.root.appendChild(this.noticeHost);

    this.transcriptHost = document.createElement("div");
    this.transcriptHost.className = "app__transcript";
    this.transcriptHost.id = "transcript";
    this.root.appendChild(this.transcriptHost);

    this.previewHost = document.createElement("div");
    this.previewHost.className = "app__preview";
    this.previewHost.id = "route-preview";
    this.previewHost.hidden = true;
    this.root.appendChild(this.previewHost);

    const composer = document.createElement("form");
    composer.className = "app__composer";
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send();
    });
    this.input = document.createElement("textarea");
    this.input.id = "chat-input";
    this.input.rows = 2;
    this.input.placeholder = locale.inputPlaceholder;
    this.input.addEventListener("input", () => this.preview.update(this.input.value));
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        void this.send();
      }
    });
    composer.appendChild(this.input);
    this.sendButton = document.createElement("button");
    this.sendButton.type = "submit";
    this.sendButton.id = "send-button";
    this.sendButton.textContent = locale.send;
    composer.appendChild(this.sendButton);
    this.root.appendChild(composer);

    container.appendChild(this.root);

    this.preview = new RoutePreview(client, (decision) => this.showPreview(decision), previewDebounceMs);
  }

  get currentSessionId(): string | null {
    return this.sessionId;
  }

  async newSession(): Promise<void> {
    this.clearNotice();
    this.sessionId = await this.client.createSession();
    this.transcriptHost.replaceChildren(
      renderTranscript(
        { session_id: this.sessionId, created_at_ms: 0, answer_in_hakka: false, messages: [] },
        this.locale,
      ),
    );
    this.input.value = "";
    this.input.focus();
  }

  async resume(sessionId: string): Promise<void> {
    this.clearNotice();
    try {
      const transcript = await this.client.getSession(sessionId);
      this.sessionId = transcript.session_id;
      this.transcriptHost.replaceChildren(renderTranscript(transcript, this.locale));
    } catch (error) {
      if (error instanceof UnknownSessionError) {
        this.showNotice(this.locale.unknownSession);
        return;
      }
      throw error;
    }
  }

  async send(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.pending) return;
    if (this.sessionId === null) await this.newSession();
    const sessionId = this.sessionId as string;

    this.clearNotice();
    this.setPending(true);
    this.transcriptHost.querySelector(".transcript__empty")?.remove();

    const transcript = this.transcriptHost.querySelector(".transcript") ?? this.transcriptHost;
    const userMessage: ChatMessage = { turn: -1, author: "user", text, envelope: null };
    const optimistic = renderMessage(userMessage, this.locale);
    transcript.appendChild(optimistic);

    const pendingNode = document.createElement("div");
    pendingNode.className = "message message--pending";
    pendingNode.textContent = this.locale.pending;
    transcript.appendChild(pendingNode);

    this.input.value = "";
    this.preview.update("");

    try {
      const envelope = await this.client.sendTurn(sessionId, text);
      pendingNode.remove();
      const assistant = document.createElement("article");
      assistant.className = "message message--assistant";
      assistant.appendChild(renderEnvelope(envelope, this.locale));
      transcript.appendChild(assistant);
    } catch (error) {
      pendingNode.remove();
      optimistic.remove();
      this.input.value = text; // the turn is not silently dropped
      if (error instanceof UnknownSessionError) {
        this.showNotice(this.locale.unknownSession);
      } else {
        this.showRetry(text);
      }
    } finally {
      this.setPending(false);
      this.scrollToEnd();
    }
  }

  private showRetry(text: string): void {
    this.noticeHost.replaceChildren();
    this.noticeHost.hidden = false;
    const label = document.createElement("span");
    label.textContent = this.locale.networkError;
    this.noticeHost.appendChild(label);
    const retry = document.createElement("button");
    retry.type = "button";
    retry.id = "retry-button";
    retry.textContent = this.locale.retry;
    retry.addEventListener("click", () => {
      this.input.value = text;
      void this.send();
    });
    this.noticeHost.appendChild(retry);
  }

  private showNotice(text: string): void {
    this.noticeHost.replaceChildren();
    this.noticeHost.hidden = false;
    this.noticeHost.textContent = text;
  }

  private clearNotice(): void {
    this.noticeHost.hidden = true;
    this.noticeHost.replaceChildren();
  }

  private setPending(pending: boolean): void {
    this.pending = pending;
    this.input.disabled = pending;
    this.sendButton.disabled = pending;
  }

  private showPreview(decision: RouteDecision | null): void {
    if (decision === null) {
      this.previewHost.hidden = true;
      this.previewHost.replaceChildren();
      return;
    }
    this.previewHost.hidden = false;
    this.previewHost.replaceChildren();
    const label = document.createElement("span");
    label.className = "preview__label";
    label.textContent = this.locale.previewLabel;
    this.previewHost.appendChild(label);
    this.previewHost.appendChild(routeBadge(decision.route, this.locale));
    const confidence = document.createElement("span");
    confidence.className = "preview__confidence";
    confidence.textContent = this.locale.previewConfidence(decision.confidence);
    this.previewHost.appendChild(confidence);
    if (decision.top_similarity !== null) {
      const similarity = document.createElement("span");
      similarity.className = "preview__similarity";
      similarity.textContent = this.locale.previewSimilarity(decision.top_similarity);
      this.previewHost.appendChild(similarity);
    }
  }

  private scrollToEnd(): void {
    this.transcriptHost.scrollTop = this.transcriptHost.scrollHeight;
  }
}
