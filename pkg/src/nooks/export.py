"""Research-grade participation log export.

One plain-text record per nook: what it was about, who created it, who
opted in and out, who ended up in the channel, and when each lifecycle step
happened. Chat messages are not in the event log, so they cannot appear
here. Member demographics ride along only when explicitly requested.
"""

from __future__ import annotations

from typing import Any, Iterable

from nooks import events as ev
from nooks.events import LogEvent


def _esc(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")


def build_participation_log(
    events: Iterable[LogEvent], include_demographics: bool = False
) -> str:
    nooks: dict[str, dict[str, Any]] = {}
    members: dict[str, dict[str, Any]] = {}

    for event in events:
        data = event.data
        if event.type == ev.NOOK_CREATED:
            nooks[data["nook_id"]] = {
                "topic": data["topic"],
                "details": data["initial_thoughts"],
                "channel_title": data["channel_title"],
                "creator": data["creator"],
                "origin": data["origin"],
                "excluded": list(data["excluded"]),
                "created_at": event.occurred_at,
                "batch_date": data["batch_date"],
                "responses": {},
                "incubation_opened_at": None,
                "outcome": "queued",
                "members": [],
                "activated_at": None,
                "archived_at": None,
                "persistent": False,
            }
        elif event.type == ev.RESPONSE_RECORDED:
            nooks[data["nook_id"]]["responses"][data["user_id"]] = data["choice"]
        elif event.type == ev.BATCH_OPENED:
            for nook_id in data["nook_ids"]:
                nooks[nook_id]["incubation_opened_at"] = event.occurred_at
                nooks[nook_id]["outcome"] = "incubating"
        elif event.type == ev.NOOK_ACTIVATED:
            record = nooks[data["nook_id"]]
            record["outcome"] = "activated"
            record["members"] = list(data["members"])
            record["activated_at"] = event.occurred_at
        elif event.type == ev.NOOK_NOT_ACTIVATED:
            record = nooks[data["nook_id"]]
            record["outcome"] = f"not-activated ({data['reason']})"
        elif event.type == ev.CHANNEL_ARCHIVED:
            nooks[data["nook_id"]]["archived_at"] = event.occurred_at
        elif event.type == ev.CHANNEL_UNARCHIVED:
            nooks[data["nook_id"]]["persistent"] = True
        elif event.type == ev.MEMBER_ADDED_TO_CHANNEL:
            record = nooks[data["nook_id"]]
            if data["invitee"] not in record["members"]:
                record["members"].append(data["invitee"])
        elif event.type == ev.MEMBER_ONBOARDED:
            members[data["user_id"]] = {
                "display_name": data["display_name"],
                "demographics": data.get("demographics") or {},
                "onboarded_at": event.occurred_at,
            }

    lines = ["# nooks participation log v1", ""]
    for nook_id in sorted(nooks):
        record = nooks[nook_id]
        interested = sorted(u for u, c in record["responses"].items() if c == "interested")
        not_interested = sorted(u for u, c in record["responses"].items() if c == "not_for_me")
        lines.append(f"nook: {nook_id}")
        lines.append(f"topic: {_esc(record['topic'])}")
        lines.append(f"details: {_esc(record['details'])}")
        lines.append(f"channel-title: {record['channel_title']}")
        lines.append(f"creator: {record['creator']}")
        lines.append(f"origin: {record['origin']}")
        lines.append(f"created-at: {record['created_at'].isoformat()}")
        lines.append(f"batch-date: {record['batch_date']}")
        if record["incubation_opened_at"]:
            lines.append(f"incubation-opened-at: {record['incubation_opened_at'].isoformat()}")
        lines.append(f"outcome: {record['outcome']}")
        lines.append(f"excluded: {', '.join(sorted(record['excluded']))}")
        lines.append(f"interested: {', '.join(interested)}")
        lines.append(f"not-interested: {', '.join(not_interested)}")
        lines.append(f"members: {', '.join(sorted(record['members']))}")
        if record["activated_at"]:
            lines.append(f"activated-at: {record['activated_at'].isoformat()}")
        if record["archived_at"]:
            lines.append(f"archived-at: {record['archived_at'].isoformat()}")
        if record["persistent"]:
            lines.append("persistent: true")
        lines.append("")

    if include_demographics:
        for user in sorted(members):
            record = members[user]
            lines.append(f"member: {user}")
            lines.append(f"display-name: {_esc(record['display_name'])}")
            lines.append(f"onboarded-at: {record['onboarded_at'].isoformat()}")
            for key in sorted(record["demographics"]):
                lines.append(f"demographic.{key}: {_esc(record['demographics'][key])}")
            lines.append("")

    return "\n".join(lines)
