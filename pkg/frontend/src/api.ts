import type { AnswerEnvelope, Health, RouteDecision, SessionTranscript } from "./types.js";

export class UnknownSessionError extends Error {
  constructor(sessionId: string) {
    super(`unknown session: ${sessionId}`);
    this.name = "UnknownSessionError";
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function raiseFor(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

/** Typed client for the chat service; the only backend the UI talks to. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async createSession(answerInHakka = false): Promise<string> {
    const response = await fetch(this.url("/api/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ answer_in_hakka: answerInHakka }),
    });
    if (!response.ok) await raiseFor(response);
    const body = await response.json();
    return body.session_id as string;
  }

  async getSession(sessionId: string): Promise<SessionTranscript> {
    const response = await fetch(this.url(`/api/sessions/${encodeURIComponent(sessionId)}`));
    if (response.status === 404) throw new UnknownSessionError(sessionId);
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as SessionTranscript;
  }

  async sendTurn(sessionId: string, text: string): Promise<AnswerEnvelope> {
    const response = await fetch(this.url(`/api/sessions/${encodeURIComponent(sessionId)}/turns`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (response.status === 404) throw new UnknownSessionError(sessionId);
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as AnswerEnvelope;
  }

  async previewRoute(text: string): Promise<RouteDecision> {
    const response = await fetch(this.url("/api/route/preview"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as RouteDecision;
  }

  async health(): Promise<Health> {
    const response = await fetch(this.url("/api/health"));
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as Health;
  }
}
