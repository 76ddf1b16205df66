from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from nooks.api import create_app
from nooks.core.model import Choice
from tests.conftest import et, open_workspace, run_until

MONDAY_8AM = et(2026, 8, 3, 8, 0)
USERS = ["alice", "bob", "carol", "dave"]


@pytest.fixture
def ws_clock(tmp_path):
    ws, clock = open_workspace(tmp_path, USERS, MONDAY_8AM)
    yield ws, clock
    ws.close()


@pytest.fixture
def client(ws_clock):
    ws, _clock = ws_clock
    return TestClient(create_app(ws), raise_server_exceptions=False)


def auth(ws, user):
    return {"Authorization": f"Bearer {ws.token_for(user)}"}


def admin_auth(ws):
    return {"Authorization": f"Bearer {ws.config.effective_admin_token}"}


# every bearer route, with a representative method and path
PROTECTED_ROUTES = [
    ("GET", "/api/v1/home"),
    ("GET", "/api/v1/samples"),
    ("POST", "/api/v1/nooks"),
    ("POST", "/api/v1/nooks/nook-0001/response"),
    ("GET", "/api/v1/channels"),
    ("GET", "/api/v1/channels/nook-0001/messages"),
    ("POST", "/api/v1/channels/nook-0001/messages"),
    ("POST", "/api/v1/channels/nook-0001/unarchive"),
    ("POST", "/api/v1/channels/nook-0001/members"),
    ("POST", "/api/v1/users/bob/direct"),
    ("GET", "/api/v1/inbox"),
    ("GET", "/api/v1/members"),
    ("POST", "/api/v1/admin/onboard"),
    ("POST", "/api/v1/admin/predefined"),
    ("PUT", "/api/v1/admin/schedule"),
    ("PUT", "/api/v1/admin/samples"),
]


class TestAuth:
    @pytest.mark.parametrize("method,path", PROTECTED_ROUTES)
    def test_unauthenticated_requests_get_401(self, client, method, path):
        response = client.request(method, path, json={})
        assert response.status_code == 401, path

    @pytest.mark.parametrize("method,path", PROTECTED_ROUTES)
    def test_garbage_token_gets_401(self, client, method, path):
        response = client.request(
            method, path, json={}, headers={"Authorization": "Bearer nonsense"}
        )
        assert response.status_code == 401, path

    def test_member_token_cannot_reach_admin_routes(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/admin/onboard", json={"user_names": ["bob"]}, headers=auth(ws, "alice")
        )
        assert response.status_code == 401

    def test_admin_token_is_not_a_member_token(self, ws_clock, client):
        ws, _ = ws_clock
        assert client.get("/api/v1/home", headers=admin_auth(ws)).status_code == 401

    def test_signup_with_unknown_invite_code_is_401(self, client):
        response = client.post(
            "/api/v1/signup",
            json={"invite_code": "bogus", "display_name": "X", "consent": True},
        )
        assert response.status_code == 401


class TestSignup:
    def test_consent_false_is_403(self, tmp_path):
        ws, _ = open_workspace(
            tmp_path, ["newbie"], MONDAY_8AM, signup=False
        )
        client = TestClient(create_app(ws))
        response = client.post(
            "/api/v1/signup",
            json={
                "invite_code": ws.invite_code_for("newbie"),
                "display_name": "Newbie",
                "consent": False,
            },
        )
        assert response.status_code == 403
        assert response.json()["error"] == "ConsentRequired"
        ws.close()

    def test_signup_returns_token_and_twice_conflicts(self, tmp_path):
        ws, _ = open_workspace(tmp_path, ["newbie"], MONDAY_8AM, signup=False)
        client = TestClient(create_app(ws))
        body = {
            "invite_code": ws.invite_code_for("newbie"),
            "display_name": "Newbie",
            "demographics": {"team": "design"},
            "consent": True,
        }
        first = client.post("/api/v1/signup", json=body)
        assert first.status_code == 201
        token = first.json()["token"]
        assert client.get(
            "/api/v1/home", headers={"Authorization": f"Bearer {token}"}
        ).status_code == 200
        assert client.post("/api/v1/signup", json=body).status_code == 409
        ws.close()


class TestNookRoutes:
    def test_create_and_incubate(self, ws_clock, client):
        ws, clock = ws_clock
        response = client.post(
            "/api/v1/nooks",
            json={"topic": "mystery novels", "initial_thoughts": "recs",
                  "channel_title": "mystery-novels"},
            headers=auth(ws, "alice"),
        )
        assert response.status_code == 201
        nook_id = response.json()["nook_id"]
        assert response.json()["batch_date"] == "2026-08-03"

        # card hidden until the batch opens at 16:00
        home = client.get("/api/v1/home", headers=auth(ws, "bob")).json()
        assert home["cards"] == []
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        home = client.get("/api/v1/home", headers=auth(ws, "bob")).json()
        assert [c["card"]["nook_id"] for c in home["cards"]] == [nook_id]

    def test_validation_errors_are_422_with_fields(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/nooks",
            json={"topic": "", "channel_title": "bad title!", "excluded": ["alice"]},
            headers=auth(ws, "alice"),
        )
        assert response.status_code == 422
        codes = {e["code"] for e in response.json()["errors"]}
        assert codes == {"TitleBadCharset", "EmptyTopic", "SelfExclusion"}

    def test_response_roundtrip_and_overwrite(self, ws_clock, client):
        ws, clock = ws_clock
        nook = ws.create_nook("alice", "books", "", "books")
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        headers = auth(ws, "bob")
        first = client.post(
            f"/api/v1/nooks/{nook.id}/response", json={"choice": "interested"}, headers=headers
        )
        assert first.status_code == 200
        second = client.post(
            f"/api/v1/nooks/{nook.id}/response", json={"choice": "not_for_me"}, headers=headers
        )
        assert second.status_code == 200
        home = client.get("/api/v1/home", headers=headers).json()
        assert home["cards"][0]["my_response"] == "not_for_me"

    def test_response_after_activation_is_409(self, ws_clock, client):
        ws, clock = ws_clock
        nook = ws.create_nook("alice", "books", "", "books")
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        ws.respond("bob", nook.id, Choice.INTERESTED)
        run_until(ws, clock, et(2026, 8, 4, 12, 0))
        response = client.post(
            f"/api/v1/nooks/{nook.id}/response",
            json={"choice": "interested"},
            headers=auth(ws, "carol"),
        )
        assert response.status_code == 409
        assert response.json()["error"] == "ResponseWindowClosed"

    def test_excluded_user_sees_no_card_and_cannot_respond(self, ws_clock, client):
        ws, clock = ws_clock
        nook = ws.create_nook("alice", "surprise party", "", "surprise", excluded=["dave"])
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        home = client.get("/api/v1/home", headers=auth(ws, "dave")).json()
        assert home["cards"] == []
        response = client.post(
            f"/api/v1/nooks/{nook.id}/response",
            json={"choice": "interested"},
            headers=auth(ws, "dave"),
        )
        assert response.status_code == 403
        assert response.json()["error"] == "ExcludedUser"

    def test_bad_choice_is_422(self, ws_clock, client):
        ws, clock = ws_clock
        nook = ws.create_nook("alice", "books", "", "books")
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        response = client.post(
            f"/api/v1/nooks/{nook.id}/response", json={"choice": "maybe"},
            headers=auth(ws, "bob"),
        )
        assert response.status_code == 422

    def test_samples_pages(self, ws_clock, client):
        ws, _ = ws_clock
        page0 = client.get("/api/v1/samples?page=0", headers=auth(ws, "alice")).json()
        page1 = client.get("/api/v1/samples?page=1", headers=auth(ws, "alice")).json()
        assert len(page0["samples"]) == 2
        assert page0 != page1


def activate_books_channel(ws, clock, members=("bob", "carol")):
    nook = ws.create_nook("alice", "books", "recs", "books", excluded=["dave"])
    run_until(ws, clock, et(2026, 8, 3, 16, 0))
    for member in members:
        ws.respond(member, nook.id, Choice.INTERESTED)
    run_until(ws, clock, et(2026, 8, 4, 12, 0))
    return nook


class TestChannelRoutes:
    def test_member_sees_channel_and_messages(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock)
        channels = client.get("/api/v1/channels", headers=auth(ws, "bob")).json()["channels"]
        assert [c["nook_id"] for c in channels] == [nook.id]
        assert channels[0]["members"] == ["alice", "bob", "carol"]
        messages = client.get(
            f"/api/v1/channels/{nook.id}/messages", headers=auth(ws, "bob")
        ).json()["messages"]
        assert "Super-excited" in messages[0]["body"]

    def test_non_member_gets_404_not_403(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock)
        response = client.get(
            f"/api/v1/channels/{nook.id}/messages", headers=auth(ws, "dave")
        )
        assert response.status_code == 404
        missing = client.get(
            "/api/v1/channels/nook-9999/messages", headers=auth(ws, "dave")
        )
        assert missing.status_code == 404
        # indistinguishable by design
        assert response.json()["error"] == missing.json()["error"]

    def test_post_message_roundtrip(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock)
        response = client.post(
            f"/api/v1/channels/{nook.id}/messages",
            json={"body": "any Christie fans?"},
            headers=auth(ws, "carol"),
        )
        assert response.status_code == 201
        messages = client.get(
            f"/api/v1/channels/{nook.id}/messages", headers=auth(ws, "alice")
        ).json()["messages"]
        assert messages[-1]["body"] == "any Christie fans?"

    def test_post_to_archived_channel_is_409(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock)
        run_until(ws, clock, et(2026, 8, 5, 12, 0))
        response = client.post(
            f"/api/v1/channels/{nook.id}/messages", json={"body": "too late"},
            headers=auth(ws, "bob"),
        )
        assert response.status_code == 409

    def test_unarchive_then_repeat_conflicts(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock)
        run_until(ws, clock, et(2026, 8, 5, 12, 0))
        first = client.post(
            f"/api/v1/channels/{nook.id}/unarchive", headers=auth(ws, "bob")
        )
        assert first.status_code == 200
        assert first.json() == {"nook_id": nook.id, "archived": False, "persistent": True}
        second = client.post(
            f"/api/v1/channels/{nook.id}/unarchive", headers=auth(ws, "bob")
        )
        assert second.status_code == 409
        assert second.json()["error"] == "AlreadyActive"

    def test_add_member_paths(self, ws_clock, client):
        ws, clock = ws_clock
        nook = activate_books_channel(ws, clock, members=("bob",))
        # excluded user can never be added
        response = client.post(
            f"/api/v1/channels/{nook.id}/members", json={"user_id": "dave"},
            headers=auth(ws, "bob"),
        )
        assert response.status_code == 403
        assert response.json()["error"] == "ExcludedUser"
        # a consented non-member can be
        ok = client.post(
            f"/api/v1/channels/{nook.id}/members", json={"user_id": "carol"},
            headers=auth(ws, "bob"),
        )
        assert ok.status_code == 200
        assert "carol" in ok.json()["members"]
        again = client.post(
            f"/api/v1/channels/{nook.id}/members", json={"user_id": "carol"},
            headers=auth(ws, "bob"),
        )
        assert again.status_code == 409

    def test_member_directory(self, ws_clock, client):
        ws, _ = ws_clock
        members = client.get("/api/v1/members", headers=auth(ws, "alice")).json()["members"]
        assert [m["user_id"] for m in members] == ["alice", "bob", "carol", "dave"]
        assert members[0]["display_name"] == "Alice"

    def test_direct_message(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/users/bob/direct", json={"body": "coffee later?"},
            headers=auth(ws, "alice"),
        )
        assert response.status_code == 200
        inbox = client.get("/api/v1/inbox", headers=auth(ws, "bob")).json()["messages"]
        assert inbox[-1] == {"from": "alice", "text": "coffee later?", "at": inbox[-1]["at"]}


class TestNoSocialSignals:
    def test_card_payloads_identical_for_all_viewers(self, ws_clock, client):
        ws, clock = ws_clock
        ws.create_nook("alice", "books", "recs", "books")
        run_until(ws, clock, et(2026, 8, 3, 16, 0))
        ws.respond("bob", "nook-0001", Choice.INTERESTED)  # counts must not leak
        rendered = set()
        for viewer in USERS:
            home = client.get("/api/v1/home", headers=auth(ws, viewer)).json()
            card = home["cards"][0]["card"]
            assert set(card) == {"nook_id", "topic", "initial_thoughts"}
            rendered.add(json.dumps(card, sort_keys=True))
        assert len(rendered) == 1

    def test_home_shows_encounters_after_activation(self, ws_clock, client):
        ws, clock = ws_clock
        activate_books_channel(ws, clock)
        home = client.get("/api/v1/home", headers=auth(ws, "bob")).json()
        names = {e["user_id"]: e["count"] for e in home["encounters"]}
        assert names == {"alice": 1, "carol": 1}


class TestAdminRoutes:
    def test_onboard_users(self, tmp_path):
        ws, _ = open_workspace(tmp_path, ["amy", "max"], MONDAY_8AM, signup=False)
        client = TestClient(create_app(ws))
        response = client.post(
            "/api/v1/admin/onboard", json={"user_names": ["amy", "max"]},
            headers=admin_auth(ws),
        )
        assert response.status_code == 200
        assert response.json()["invited"] == ["amy", "max"]
        assert any("invite code" in m["text"] for m in ws.adapter.inbox("amy"))
        ws.close()

    def test_onboard_unknown_user_is_422(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/admin/onboard", json={"user_names": ["stranger"]},
            headers=admin_auth(ws),
        )
        assert response.status_code == 422

    def test_predefined_nooks_are_queued_for_their_day(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/admin/predefined",
            json={
                "nooks": [
                    {
                        "topic": "What's a new interest you've gotten into in the last 6-12 months?",
                        "batch_date": "2026-08-10",
                    }
                ]
            },
            headers=admin_auth(ws),
        )
        assert response.status_code == 201
        nook = ws.state.nooks[response.json()["nook_ids"][0]]
        assert nook.origin.value == "predefined"
        assert nook.batch_date.isoformat() == "2026-08-10"
        assert nook.initial_thoughts == ""

    def test_predefined_with_bad_explicit_title_is_422(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/admin/predefined",
            json={"nooks": [{"topic": "movie night", "channel_title": "bad title!",
                             "batch_date": "2026-08-10"}]},
            headers=admin_auth(ws),
        )
        assert response.status_code == 422

    def test_predefined_in_the_past_is_422(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.post(
            "/api/v1/admin/predefined",
            json={"nooks": [{"topic": "too late", "batch_date": "2026-08-01"}]},
            headers=admin_auth(ws),
        )
        assert response.status_code == 422

    def test_set_schedule(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.put(
            "/api/v1/admin/schedule",
            json={"activation_time": "13:00", "min_members_to_activate": 3},
            headers=admin_auth(ws),
        )
        assert response.status_code == 200
        assert ws.state.schedule.activation_time.isoformat() == "13:00:00"
        assert ws.state.schedule.min_members_to_activate == 3

    def test_set_schedule_rejects_equal_times(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.put(
            "/api/v1/admin/schedule",
            json={"activation_time": "16:00"},
            headers=admin_auth(ws),
        )
        assert response.status_code == 422

    def test_set_samples(self, ws_clock, client):
        ws, _ = ws_clock
        response = client.put(
            "/api/v1/admin/samples",
            json={"samples": [{"topic": "team trivia", "initial_thoughts": "lunch?"}]},
            headers=admin_auth(ws),
        )
        assert response.status_code == 200
        page = client.get("/api/v1/samples", headers=auth(ws, "alice")).json()
        assert page["samples"] == [{"topic": "team trivia", "initial_thoughts": "lunch?"}]
