"""Event vocabulary for the append-only workspace log.

Every state change is one of these payloads. The schemas are closed: each
variant allows exactly its declared fields, and no variant has anywhere to
put chat message text. The redaction gate re-checks both properties at
append time so a future variant cannot quietly start carrying conversation
content.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Any

MEMBER_ONBOARDED = "MemberOnboarded"
CONSENT_RECORDED = "ConsentRecorded"
NOOK_CREATED = "NookCreated"
RESPONSE_RECORDED = "ResponseRecorded"
BATCH_OPENED = "BatchOpened"
NOOK_ACTIVATED = "NookActivated"
NOOK_NOT_ACTIVATED = "NookNotActivated"
CHANNEL_ARCHIVED = "ChannelArchived"
CHANNEL_UNARCHIVED = "ChannelUnarchived"
MEMBER_ADDED_TO_CHANNEL = "MemberAddedToChannel"
CONFIG_CHANGED = "ConfigChanged"

# type -> exactly the fields its payload may carry
EVENT_SCHEMAS: dict[str, frozenset[str]] = {
    MEMBER_ONBOARDED: frozenset({"user_id", "display_name", "demographics"}),
    CONSENT_RECORDED: frozenset({"user_id"}),
    NOOK_CREATED: frozenset(
        {
            "nook_id",
            "creator",
            "topic",
            "initial_thoughts",
            "channel_title",
            "excluded",
            "require_two_others",
            "origin",
            "batch_date",
        }
    ),
    RESPONSE_RECORDED: frozenset({"nook_id", "user_id", "choice"}),
    BATCH_OPENED: frozenset({"batch_date", "nook_ids"}),
    NOOK_ACTIVATED: frozenset(
        {"nook_id", "channel_ref", "channel_name", "members", "archive_due_at"}
    ),
    NOOK_NOT_ACTIVATED: frozenset({"nook_id", "reason"}),
    CHANNEL_ARCHIVED: frozenset({"nook_id"}),
    CHANNEL_UNARCHIVED: frozenset({"nook_id", "unarchived_by"}),
    MEMBER_ADDED_TO_CHANNEL: frozenset({"nook_id", "inviter", "invitee"}),
    CONFIG_CHANGED: frozenset({"schedule", "samples"}),
}

# Field names that would indicate conversation content sneaking into the log.
MESSAGE_BODY_FIELDS = frozenset({"body", "message", "message_body", "messages", "text"})


class RedactionViolation(Exception):
    """Payload shape could carry chat content; refuse to log it."""


def check_payload(event_type: str, data: dict[str, Any]) -> None:
    """Redaction gate: closed schema per variant, no message-body fields."""
    schema = EVENT_SCHEMAS.get(event_type)
    if schema is None:
        raise RedactionViolation(f"unknown event type {event_type!r}")
    extra = set(data) - schema
    if extra:
        raise RedactionViolation(f"{event_type} does not allow fields {sorted(extra)}")
    _scan_keys(data, event_type)


def _scan_keys(value: Any, path: str) -> None:
    if isinstance(value, dict):
        for key, nested in value.items():
            if isinstance(key, str) and key.lower() in MESSAGE_BODY_FIELDS:
                raise RedactionViolation(f"{path}.{key} looks like message content")
            _scan_keys(nested, f"{path}.{key}")
    elif isinstance(value, (list, tuple)):
        for item in value:
            _scan_keys(item, path)


@dataclass(frozen=True)
class LogEvent:
    sequence: int
    occurred_at: datetime
    type: str
    data: dict[str, Any]
