// Wire types mirroring the chat service JSON API.

export type Route = "translation" | "cultural_kb" | "web_search";

export interface Citation {
  citation_id: string;
  source_kind: string;
  ref: string;
  quote: string;
}

export interface AnswerEnvelope {
  answer: string;
  route: Route;
  citations: Citation[];
  latency_ms: number;
  degraded: string | null;
}

export interface ChatMessage {
  turn: number;
  author: "user" | "assistant";
  text: string;
  envelope: AnswerEnvelope | null;
}

export interface SessionTranscript {
  session_id: string;
  created_at_ms: number;
  answer_in_hakka: boolean;
  messages: ChatMessage[];
}

export interface RouteDecision {
  route: Route;
  confidence: number;
  rationale: string;
  top_similarity: number | null;
}

export interface Health {
  status: string;
  corpus_stats: Record<string, number>;
  providers: Record<string, string>;
}
