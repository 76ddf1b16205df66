"""Server-side halves of the web UI acceptance criteria.

S1 parity: the exact title table the frontend validates client-side must
get the same verdicts here when the client is bypassed. The DOM halves
live in frontend/tests (vitest).
"""

from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from nooks.api import create_app
from tests.conftest import et, open_workspace

FRONTEND = Path(__file__).resolve().parents[1] / "frontend"

# keep in sync with frontend/tests/validation.test.ts
TITLE_VERDICTS = [
    ("embarrassing-moment", None),
    ("Mystery-Novels", None),
    ("", "EmptyTitle"),
    ("july 4th plans!", "TitleBadCharset"),
    ("a" * 60, "TitleTooLong"),
    ("a" * 59, None),
]


@pytest.fixture
def client_ws(tmp_path):
    ws, _clock = open_workspace(tmp_path, ["amy"], et(2026, 8, 3, 9, 0))
    yield TestClient(create_app(ws)), ws
    ws.close()


@pytest.mark.parametrize("title,expected_code", TITLE_VERDICTS)
def test_title_rules_match_the_client_table(client_ws, title, expected_code):
    client, ws = client_ws
    response = client.post(
        "/api/v1/nooks",
        json={"topic": "parity check", "channel_title": title},
        headers={"Authorization": f"Bearer {ws.token_for('amy')}"},
    )
    if expected_code is None:
        assert response.status_code == 201
    else:
        assert response.status_code == 422
        assert expected_code in {e["code"] for e in response.json()["errors"]}


@pytest.mark.skipif(
    not (FRONTEND / "dist" / "index.html").exists(),
    reason="frontend not built (cd frontend && npm run build)",
)
def test_built_frontend_is_served_at_root(tmp_path):
    ws, _clock = open_workspace(tmp_path, ["amy"], et(2026, 8, 3, 9, 0))
    client = TestClient(create_app(ws, static_dir=FRONTEND / "dist"))
    index = client.get("/")
    assert index.status_code == 200
    assert '<div id="app">' in index.text
    assert client.get("/app.js").status_code == 200
    assert client.get("/views/home.js").status_code == 200
    assert client.get("/styles.css").status_code == 200
    ws.close()
