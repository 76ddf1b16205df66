"""Workspace state as a fold over the event log.

The in-memory state the service works against is always reproducible by
replaying events.log from zero (or from a snapshot). apply() is the single
place an event changes state, for both live operation and reconcile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import Any, Iterable

from nooks import events as ev
from nooks.core.model import (
    ChannelRecord,
    Choice,
    InterestResponse,
    MemberProfile,
    Nook,
    NookOrigin,
    NookState,
    NotActivatedReason,
    UserId,
)
from nooks.core.schedule import ScheduleConfig


class CorruptState(Exception):
    """Persisted lifecycle violates the nook state machine."""


@dataclass
class WorkspaceState:
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    samples: list[tuple[str, str]] = field(default_factory=list)
    members: dict[UserId, MemberProfile] = field(default_factory=dict)
    nooks: dict[str, Nook] = field(default_factory=dict)
    responses: dict[str, dict[UserId, InterestResponse]] = field(default_factory=dict)
    channels: dict[str, ChannelRecord] = field(default_factory=dict)
    batches_opened: set[date] = field(default_factory=set)
    install_date: date | None = None
    applied: int = 0  # sequence of the next event to apply

    # -- views -------------------------------------------------------------

    def roster(self) -> set[UserId]:
        return {u for u, p in self.members.items() if p.consented}

    def incubating_batch(self, batch_date: date) -> list[Nook]:
        batch = [
            n
            for n in self.nooks.values()
            if n.batch_date == batch_date and n.state is NookState.INCUBATING
        ]
        batch.sort(key=lambda n: (n.created_at, n.id))
        return batch

    def queued_batch(self, batch_date: date) -> list[Nook]:
        batch = [
            n
            for n in self.nooks.values()
            if n.batch_date == batch_date and n.state is NookState.QUEUED
        ]
        batch.sort(key=lambda n: (n.created_at, n.id))
        return batch

    def current_incubating(self) -> list[Nook]:
        batch = [n for n in self.nooks.values() if n.state is NookState.INCUBATING]
        batch.sort(key=lambda n: (n.created_at, n.id))
        return batch

    def encounter_history(self) -> list[tuple[str, frozenset[UserId]]]:
        records = sorted(self.channels.values(), key=lambda c: (c.activated_at, c.nook_id))
        return [(c.nook_id, c.members) for c in records]

    def next_nook_id(self) -> str:
        return f"nook-{len(self.nooks) + 1:04d}"

    # -- fold --------------------------------------------------------------

    def apply(self, event: ev.LogEvent) -> None:
        handler = _HANDLERS.get(event.type)
        if handler is None:
            raise CorruptState(f"unknown event type {event.type!r} at {event.sequence}")
        try:
            handler(self, event)
        except (ValueError, KeyError) as exc:
            raise CorruptState(f"event {event.sequence} ({event.type}): {exc}") from exc
        self.applied = event.sequence + 1


def fold(events: Iterable[ev.LogEvent], base: WorkspaceState | None = None) -> WorkspaceState:
    state = base if base is not None else WorkspaceState()
    for event in events:
        state.apply(event)
    return state


# -- handlers -------------------------------------------------------------


def _on_member_onboarded(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    state.members[data["user_id"]] = MemberProfile(
        user_id=data["user_id"],
        display_name=data["display_name"],
        consented=False,
        onboarded_at=event.occurred_at,
        demographics=dict(data.get("demographics") or {}),
    )


def _on_consent_recorded(state: WorkspaceState, event: ev.LogEvent) -> None:
    profile = state.members[event.data["user_id"]]
    state.members[profile.user_id] = MemberProfile(
        user_id=profile.user_id,
        display_name=profile.display_name,
        consented=True,
        onboarded_at=profile.onboarded_at,
        demographics=profile.demographics,
    )


def _on_nook_created(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    if data["nook_id"] in state.nooks:
        raise ValueError(f"duplicate nook id {data['nook_id']}")
    state.nooks[data["nook_id"]] = Nook(
        id=data["nook_id"],
        creator=data["creator"],
        topic=data["topic"],
        initial_thoughts=data["initial_thoughts"],
        channel_title=data["channel_title"],
        excluded=frozenset(data["excluded"]),
        require_two_others=data["require_two_others"],
        created_at=event.occurred_at,
        batch_date=date.fromisoformat(data["batch_date"]),
        state=NookState.QUEUED,
        origin=NookOrigin(data["origin"]),
    )
    state.responses[data["nook_id"]] = {}


def _on_response_recorded(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    nook = state.nooks[data["nook_id"]]
    state.responses[nook.id][data["user_id"]] = InterestResponse(
        nook_id=nook.id,
        user_id=data["user_id"],
        choice=Choice(data["choice"]),
        responded_at=event.occurred_at,
    )


def _on_batch_opened(state: WorkspaceState, event: ev.LogEvent) -> None:
    batch_date = date.fromisoformat(event.data["batch_date"])
    if batch_date in state.batches_opened:
        raise ValueError(f"batch {batch_date} opened twice")
    state.batches_opened.add(batch_date)
    for nook_id in event.data["nook_ids"]:
        state.nooks[nook_id] = state.nooks[nook_id].with_state(NookState.INCUBATING)


def _on_nook_activated(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    nook = state.nooks[data["nook_id"]]
    state.nooks[nook.id] = nook.with_state(NookState.ACTIVATED)
    state.channels[nook.id] = ChannelRecord(
        nook_id=nook.id,
        channel_ref=data["channel_ref"],
        channel_name=data["channel_name"],
        members=frozenset(data["members"]),
        activated_at=event.occurred_at,
        archive_due_at=datetime.fromisoformat(data["archive_due_at"]),
    )


def _on_nook_not_activated(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    nook = state.nooks[data["nook_id"]]
    state.nooks[nook.id] = nook.with_state(
        NookState.NOT_ACTIVATED, NotActivatedReason(data["reason"])
    )


def _on_channel_archived(state: WorkspaceState, event: ev.LogEvent) -> None:
    nook_id = event.data["nook_id"]
    channel = state.channels[nook_id]
    if channel.archived:
        raise ValueError(f"channel for {nook_id} archived twice")
    state.nooks[nook_id] = state.nooks[nook_id].with_state(NookState.ARCHIVED)
    state.channels[nook_id] = ChannelRecord(
        nook_id=channel.nook_id,
        channel_ref=channel.channel_ref,
        channel_name=channel.channel_name,
        members=channel.members,
        activated_at=channel.activated_at,
        archive_due_at=channel.archive_due_at,
        archived=True,
        persistent=channel.persistent,
    )


def _on_channel_unarchived(state: WorkspaceState, event: ev.LogEvent) -> None:
    nook_id = event.data["nook_id"]
    channel = state.channels[nook_id]
    if not channel.archived:
        raise ValueError(f"channel for {nook_id} is not archived")
    state.nooks[nook_id] = state.nooks[nook_id].with_state(NookState.PERSISTENT)
    state.channels[nook_id] = ChannelRecord(
        nook_id=channel.nook_id,
        channel_ref=channel.channel_ref,
        channel_name=channel.channel_name,
        members=channel.members,
        activated_at=channel.activated_at,
        archive_due_at=channel.archive_due_at,
        archived=False,
        persistent=True,
    )


def _on_member_added(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    channel = state.channels[data["nook_id"]]
    nook = state.nooks[data["nook_id"]]
    if data["invitee"] in nook.excluded:
        raise ValueError(f"{data['invitee']} is excluded from {nook.id}")
    state.channels[nook.id] = ChannelRecord(
        nook_id=channel.nook_id,
        channel_ref=channel.channel_ref,
        channel_name=channel.channel_name,
        members=channel.members | {data["invitee"]},
        activated_at=channel.activated_at,
        archive_due_at=channel.archive_due_at,
        archived=channel.archived,
        persistent=channel.persistent,
    )


def _on_config_changed(state: WorkspaceState, event: ev.LogEvent) -> None:
    data = event.data
    if "schedule" in data and data["schedule"] is not None:
        state.schedule = schedule_from_doc(data["schedule"])
    if "samples" in data and data["samples"] is not None:
        state.samples = [(topic, thoughts) for topic, thoughts in data["samples"]]
    if state.install_date is None:
        state.install_date = event.occurred_at.astimezone(state.schedule.zone).date()


_HANDLERS = {
    ev.MEMBER_ONBOARDED: _on_member_onboarded,
    ev.CONSENT_RECORDED: _on_consent_recorded,
    ev.NOOK_CREATED: _on_nook_created,
    ev.RESPONSE_RECORDED: _on_response_recorded,
    ev.BATCH_OPENED: _on_batch_opened,
    ev.NOOK_ACTIVATED: _on_nook_activated,
    ev.NOOK_NOT_ACTIVATED: _on_nook_not_activated,
    ev.CHANNEL_ARCHIVED: _on_channel_archived,
    ev.CHANNEL_UNARCHIVED: _on_channel_unarchived,
    ev.MEMBER_ADDED_TO_CHANNEL: _on_member_added,
    ev.CONFIG_CHANGED: _on_config_changed,
}


# -- snapshot (de)serialization --------------------------------------------


def schedule_to_doc(schedule: ScheduleConfig) -> dict[str, Any]:
    return {
        "timezone": schedule.timezone,
        "batch_cutoff": schedule.batch_cutoff.isoformat(timespec="minutes"),
        "activation_time": schedule.activation_time.isoformat(timespec="minutes"),
        "channel_lifetime_seconds": int(schedule.channel_lifetime.total_seconds()),
        "min_members_to_activate": schedule.min_members_to_activate,
    }


def schedule_from_doc(doc: dict[str, Any]) -> ScheduleConfig:
    return ScheduleConfig(
        timezone=doc["timezone"],
        batch_cutoff=time.fromisoformat(doc["batch_cutoff"]),
        activation_time=time.fromisoformat(doc["activation_time"]),
        channel_lifetime=timedelta(seconds=doc["channel_lifetime_seconds"]),
        min_members_to_activate=doc["min_members_to_activate"],
    )


def to_doc(state: WorkspaceState) -> dict[str, Any]:
    """Canonical JSON-able snapshot of the whole state."""
    return {
        "schedule": schedule_to_doc(state.schedule),
        "samples": [list(pair) for pair in state.samples],
        "members": {
            u: {
                "display_name": p.display_name,
                "consented": p.consented,
                "onboarded_at": p.onboarded_at.isoformat(),
                "demographics": p.demographics,
            }
            for u, p in sorted(state.members.items())
        },
        "nooks": {
            n.id: {
                "creator": n.creator,
                "topic": n.topic,
                "initial_thoughts": n.initial_thoughts,
                "channel_title": n.channel_title,
                "excluded": sorted(n.excluded),
                "require_two_others": n.require_two_others,
                "created_at": n.created_at.isoformat(),
                "batch_date": n.batch_date.isoformat(),
                "state": n.state.value,
                "origin": n.origin.value,
                "not_activated_reason": (
                    n.not_activated_reason.value if n.not_activated_reason else None
                ),
            }
            for n in sorted(state.nooks.values(), key=lambda n: n.id)
        },
        "responses": {
            nook_id: {
                u: {"choice": r.choice.value, "responded_at": r.responded_at.isoformat()}
                for u, r in sorted(per_nook.items())
            }
            for nook_id, per_nook in sorted(state.responses.items())
        },
        "channels": {
            c.nook_id: {
                "channel_ref": c.channel_ref,
                "channel_name": c.channel_name,
                "members": sorted(c.members),
                "activated_at": c.activated_at.isoformat(),
                "archive_due_at": c.archive_due_at.isoformat(),
                "archived": c.archived,
                "persistent": c.persistent,
            }
            for c in sorted(state.channels.values(), key=lambda c: c.nook_id)
        },
        "batches_opened": sorted(d.isoformat() for d in state.batches_opened),
        "install_date": state.install_date.isoformat() if state.install_date else None,
        "applied": state.applied,
    }


def from_doc(doc: dict[str, Any]) -> WorkspaceState:
    state = WorkspaceState()
    state.schedule = schedule_from_doc(doc["schedule"])
    state.samples = [(topic, thoughts) for topic, thoughts in doc["samples"]]
    for u, p in doc["members"].items():
        state.members[u] = MemberProfile(
            user_id=u,
            display_name=p["display_name"],
            consented=p["consented"],
            onboarded_at=datetime.fromisoformat(p["onboarded_at"]),
            demographics=dict(p["demographics"]),
        )
    for nook_id, n in doc["nooks"].items():
        state.nooks[nook_id] = Nook(
            id=nook_id,
            creator=n["creator"],
            topic=n["topic"],
            initial_thoughts=n["initial_thoughts"],
            channel_title=n["channel_title"],
            excluded=frozenset(n["excluded"]),
            require_two_others=n["require_two_others"],
            created_at=datetime.fromisoformat(n["created_at"]),
            batch_date=date.fromisoformat(n["batch_date"]),
            state=NookState(n["state"]),
            origin=NookOrigin(n["origin"]),
            not_activated_reason=(
                NotActivatedReason(n["not_activated_reason"])
                if n["not_activated_reason"]
                else None
            ),
        )
    for nook_id, per_nook in doc["responses"].items():
        state.responses[nook_id] = {
            u: InterestResponse(
                nook_id=nook_id,
                user_id=u,
                choice=Choice(r["choice"]),
                responded_at=datetime.fromisoformat(r["responded_at"]),
            )
            for u, r in per_nook.items()
        }
    for nook_id, c in doc["channels"].items():
        state.channels[nook_id] = ChannelRecord(
            nook_id=nook_id,
            channel_ref=c["channel_ref"],
            channel_name=c["channel_name"],
            members=frozenset(c["members"]),
            activated_at=datetime.fromisoformat(c["activated_at"]),
            archive_due_at=datetime.fromisoformat(c["archive_due_at"]),
            archived=c["archived"],
            persistent=c["persistent"],
        )
    state.batches_opened = {date.fromisoformat(d) for d in doc["batches_opened"]}
    state.install_date = (
        date.fromisoformat(doc["install_date"]) if doc["install_date"] else None
    )
    state.applied = doc["applied"]
    return state
