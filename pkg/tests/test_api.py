from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from hakkachat.api import create_app


@pytest.fixture()
def client(service):
    return TestClient(create_app(service))


def test_create_session_returns_id(client):
    response = client.post("/api/sessions")
    assert response.status_code == 200
    assert len(response.json()["session_id"]) == 32


def test_get_unknown_session_is_404(client):
    response = client.get("/api/sessions/" + "0" * 32)
    assert response.status_code == 404


def test_turn_round_trip(client):
    session_id = client.post("/api/sessions").json()["session_id"]
    response = client.post(f"/api/sessions/{session_id}/turns", json={"text": "請翻譯成客語：謝謝"})
    assert response.status_code == 200
    envelope = response.json()
    assert envelope["route"] == "translation"
    assert "恁仔細" in envelope["answer"]
    assert envelope["degraded"] is None

    transcript = client.get(f"/api/sessions/{session_id}").json()
    assert [m["author"] for m in transcript["messages"]] == ["user", "assistant"]
    assert transcript["messages"][1]["envelope"]["route"] == "translation"


def test_turn_empty_text_is_400(client):
    session_id = client.post("/api/sessions").json()["session_id"]
    response = client.post(f"/api/sessions/{session_id}/turns", json={"text": "   "})
    assert response.status_code == 400


def test_turn_unknown_session_is_404(client):
    response = client.post("/api/sessions/" + "0" * 32 + "/turns", json={"text": "hi"})
    assert response.status_code == 404


def test_route_preview(client):
    response = client.post("/api/route/preview", json={"text": "請翻譯成客語：謝謝"})
    assert response.status_code == 200
    body = response.json()
    assert body["route"] == "translation"
    assert body["rationale"] == "pattern_match"
    assert body["confidence"] == 1.0

    cultural = client.post("/api/route/preview", json={"text": "擂茶是客家代表性的米食飲品嗎"}).json()
    assert cultural["route"] == "cultural_kb"
    assert cultural["top_similarity"] > 0.25


def test_route_preview_tau_override(client):
    body = client.post("/api/route/preview", json={"text": "擂茶是客家代表性的米食飲品嗎", "tau": 0.99}).json()
    assert body["route"] == "web_search"


def test_health_endpoint(client):
    body = client.get("/api/health").json()
    assert body["status"] == "ok"
    assert body["providers"]["completion"] == "stub"
    assert body["corpus_stats"]["characteristic_words"] == 4


def test_list_sessions(client):
    first = client.post("/api/sessions").json()["session_id"]
    second = client.post("/api/sessions").json()["session_id"]
    listed = client.get("/api/sessions").json()["sessions"]
    assert [s["session_id"] for s in listed] == [first, second]
