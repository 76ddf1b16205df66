from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest

from nooks import events as ev
from nooks.eventlog import CorruptRecord, EventStore
from nooks.events import RedactionViolation, check_payload

UTC = timezone.utc
T0 = datetime(2026, 8, 3, 12, 0, tzinfo=UTC)


@pytest.fixture
def store(tmp_path):
    return EventStore(tmp_path / "ws")


def onboard_payload(i=0):
    return {"user_id": f"user{i}", "display_name": f"User {i}", "demographics": {}}


class TestAppendLoad:
    def test_sequences_are_monotonic(self, store):
        first = store.append(ev.MEMBER_ONBOARDED, onboard_payload(0), T0)
        second = store.append(ev.CONSENT_RECORDED, {"user_id": "user0"}, T0)
        assert (first, second) == (0, 1)

    def test_load_empty_store(self, store):
        assert store.load(0) == []

    def test_load_from_offset(self, store):
        for i in range(5):
            store.append(ev.MEMBER_ONBOARDED, onboard_payload(i), T0)
        assert len(store.load(2)) == 3
        assert [e.sequence for e in store.load(2)] == [2, 3, 4]

    def test_load_roundtrips_payloads(self, store):
        payload = {"user_id": "u", "display_name": "Ünïcode ☃", "demographics": {"team": "qa"}}
        store.append(ev.MEMBER_ONBOARDED, payload, T0)
        event = store.load(0)[0]
        assert event.data == payload
        assert event.occurred_at == T0

    def test_reopen_preserves_log(self, tmp_path):
        store = EventStore(tmp_path / "ws")
        store.append(ev.MEMBER_ONBOARDED, onboard_payload(), T0)
        reopened = EventStore(tmp_path / "ws")
        assert reopened.next_sequence == 1
        assert reopened.load(0)[0].data["user_id"] == "user0"

    def test_negative_from_sequence_rejected(self, store):
        with pytest.raises(ValueError):
            store.load(-1)


class TestCorruption:
    def test_bit_flip_is_detected_with_sequence_number(self, tmp_path):
        store = EventStore(tmp_path / "ws")
        for i in range(4):
            store.append(ev.MEMBER_ONBOARDED, onboard_payload(i), T0)
        raw = store.log_path.read_bytes().splitlines(keepends=True)
        # flip one byte inside record 2's document
        broken = bytearray(raw[2])
        broken[-10] ^= 0x01
        store.log_path.write_bytes(b"".join(raw[:2] + [bytes(broken)] + raw[3:]))
        fresh = EventStore(tmp_path / "ws")
        with pytest.raises(CorruptRecord) as excinfo:
            fresh.load(0)
        assert excinfo.value.sequence == 2

    def test_truncated_record_is_detected(self, tmp_path):
        store = EventStore(tmp_path / "ws")
        store.append(ev.MEMBER_ONBOARDED, onboard_payload(), T0)
        data = store.log_path.read_bytes()
        store.log_path.write_bytes(data[:-8] + b"\n")
        with pytest.raises(CorruptRecord):
            EventStore(tmp_path / "ws").load(0)


class TestRedactionGate:
    def test_unknown_event_type_rejected(self):
        with pytest.raises(RedactionViolation):
            check_payload("ChatMessageLogged", {})

    def test_extra_fields_rejected(self):
        with pytest.raises(RedactionViolation):
            check_payload(ev.CHANNEL_ARCHIVED, {"nook_id": "n", "body": "hi"})

    def test_nested_message_body_field_rejected(self):
        with pytest.raises(RedactionViolation):
            check_payload(
                ev.MEMBER_ONBOARDED,
                {"user_id": "u", "display_name": "U", "demographics": {"text": "hello"}},
            )

    def test_store_refuses_violating_payload(self, store):
        with pytest.raises(RedactionViolation):
            store.append(ev.CHANNEL_ARCHIVED, {"nook_id": "n", "message": "hi"}, T0)
        assert store.load(0) == []

    def test_every_declared_schema_is_body_free(self):
        for event_type, schema in ev.EVENT_SCHEMAS.items():
            assert not (schema & ev.MESSAGE_BODY_FIELDS), event_type


class TestSnapshots:
    def test_snapshot_roundtrip(self, store):
        store.write_snapshot(10, {"hello": "world"})
        assert store.latest_snapshot() == (10, {"hello": "world"})

    def test_latest_wins(self, store):
        store.write_snapshot(10, {"n": 10})
        store.write_snapshot(2000, {"n": 2000})
        assert store.latest_snapshot() == (2000, {"n": 2000})

    def test_unreadable_snapshot_is_skipped(self, store):
        store.write_snapshot(10, {"n": 10})
        store.write_snapshot(20, {"n": 20})
        (store.snapshot_dir / "000000000020.snap").write_text("{not json", encoding="utf-8")
        assert store.latest_snapshot() == (10, {"n": 10})

    def test_no_snapshots_is_fine(self, store):
        assert store.latest_snapshot() is None

    def test_log_lines_are_human_inspectable(self, store):
        store.append(ev.CONSENT_RECORDED, {"user_id": "user0"}, T0)
        line = store.log_path.read_text(encoding="utf-8").strip()
        length, crc, doc = line.split(" ", 2)
        assert int(length) == len(doc.encode("utf-8"))
        assert json.loads(doc)["type"] == "ConsentRecorded"
