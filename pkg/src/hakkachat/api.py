"""HTTP JSON API over the chat service (the surface the browser UI
consumes).

  POST /api/sessions                  -> {"session_id": ...}
  GET  /api/sessions                  -> {"sessions": [summaries]}
  GET  /api/sessions/{id}             -> full transcript with envelopes
  POST /api/sessions/{id}/turns       -> AnswerEnvelope (appends both messages)
  POST /api/route/preview             -> RouteDecision (diagnostic)
  GET  /api/health                    -> status, corpus stats, provider states
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import EmptyInput, UnknownSession
from .service import ChatService
from .sessions import ChatSession, envelope_to_dict


class CreateSessionRequest(BaseModel):
    answer_in_hakka: bool = False


class TurnRequest(BaseModel):
    text: str


class PreviewRequest(BaseModel):
    text: str
    tau: float | None = None


def _session_to_dict(session: ChatSession) -> dict:
    return {
        "session_id": session.session_id,
        "created_at_ms": session.created_at_ms,
        "answer_in_hakka": session.answer_in_hakka,
        "messages": [
            {
                "turn": message.turn,
                "author": message.author,
                "text": message.text,
                "envelope": envelope_to_dict(message.envelope) if message.envelope else None,
            }
            for message in session.messages
        ],
    }


def create_app(service: ChatService) -> FastAPI:
    app = FastAPI(title="hakkachat", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/sessions")
    def create_session(request: CreateSessionRequest | None = None):
        answer_in_hakka = bool(request.answer_in_hakka) if request else False
        session = service.create_session(answer_in_hakka=answer_in_hakka)
        return {"session_id": session.session_id}

    @app.get("/api/sessions")
    def list_sessions(offset: int = 0, limit: int = 50):
        summaries = service.list_sessions(offset=offset, limit=limit)
        return {
            "sessions": [
                {
                    "session_id": s.session_id,
                    "created_at_ms": s.created_at_ms,
                    "message_count": s.message_count,
                }
                for s in summaries
            ]
        }

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return _session_to_dict(service.get_session(session_id))
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/api/sessions/{session_id}/turns")
    def post_turn(session_id: str, request: TurnRequest):
        try:
            envelope = service.handle_turn(session_id, request.text)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except EmptyInput as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return envelope_to_dict(envelope)

    @app.post("/api/route/preview")
    def preview(request: PreviewRequest):
        try:
            decision = service.preview_route(request.text, tau=request.tau)
        except EmptyInput as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "route": decision.route.value,
            "confidence": decision.confidence,
            "rationale": decision.rationale.value,
            "top_similarity": decision.top_similarity,
        }

    @app.get("/api/health")
    def health():
        return service.health()

    return app
