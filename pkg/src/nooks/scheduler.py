"""Time-driven orchestration of the daily routine.

Three kinds of scheduled work, all derived from persisted state rather than
a stored queue:

  * open_incubation(d)  -- due at the batch cutoff on day d; moves day-d
    nooks from queued to incubating and notifies members with visible cards.
  * activate_batch(d)   -- due at the activation time on day d+1; launches
    (or declines) every incubating nook of batch d.
  * archive_channel(n)  -- due at the channel's archive_due_at.

An occurrence counts as fired once its lifecycle event is in the log, so a
restart rebuilds exactly the unfired remainder by folding the log (that is
all reconcile() has to do, besides re-materializing platform channels).
Adapter effects run before the event is appended; if the adapter fails, the
occurrence stays pending and is retried on the next tick, and effect
idempotence (notification dedupe keys, the created-channel memo) keeps
retries from duplicating anything. A process crash between an adapter
effect and its append can re-run that effect after restart; with the
shipped localchat binding that is harmless, and real-platform bindings are
expected to layer their own idempotence keys.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, datetime, timedelta

from nooks import events as ev
from nooks import texts
from nooks.adapter import AdapterError, AlreadyArchived, ChannelRef, ChatPlatform
from nooks.core.model import NookState
from nooks.core.ops import compute_member_set, greeting_message, visible_cards
from nooks.state import WorkspaceState

log = logging.getLogger(__name__)

OPEN_INCUBATION = "open_incubation"
ACTIVATE_BATCH = "activate_batch"
ARCHIVE_CHANNEL = "archive_channel"

_KIND_ORDER = {OPEN_INCUBATION: 0, ACTIVATE_BATCH: 1, ARCHIVE_CHANNEL: 2}


@dataclass(frozen=True)
class DueEvent:
    kind: str
    due_at: datetime
    key: str  # batch date or nook id

    def sort_key(self) -> tuple:
        return (self.due_at, _KIND_ORDER[self.kind], self.key)


class Scheduler:
    """Fires due occurrences against one workspace's state, store, adapter.

    Never re-entered: the owning workspace serializes ticks with commands.
    """

    def __init__(self, state: WorkspaceState, store, adapter: ChatPlatform, record):
        # record(type, data, occurred_at) appends to the log and applies to
        # state; provided by the workspace so snapshots stay in one place.
        self.state = state
        self.store = store
        self.adapter = adapter
        self._record = record
        # Channels created whose activation event has not been appended yet
        # (adapter succeeded, a later effect failed). Lets the retry reuse
        # the channel instead of creating "<title>-2".
        self._created: dict[str, ChannelRef] = {}

    # -- queue derivation ---------------------------------------------------

    def _next_unopened(self) -> date | None:
        if self.state.install_date is None:
            return None
        if self.state.batches_opened:
            return max(max(self.state.batches_opened) + timedelta(days=1),
                       self.state.install_date)
        return self.state.install_date

    def pending(self, now: datetime) -> list[DueEvent]:
        """All unfired occurrences due at or before now, in firing order."""
        out: list[DueEvent] = []
        schedule = self.state.schedule
        day = self._next_unopened()
        if day is not None:
            while schedule.incubation_opens_at(day) <= now:
                out.append(
                    DueEvent(OPEN_INCUBATION, schedule.incubation_opens_at(day), day.isoformat())
                )
                day += timedelta(days=1)
        for batch_date in sorted({n.batch_date for n in self.state.current_incubating()}):
            due = schedule.activation_instant(batch_date)
            if due <= now:
                out.append(DueEvent(ACTIVATE_BATCH, due, batch_date.isoformat()))
        for channel in self.state.channels.values():
            if not channel.archived and not channel.persistent and channel.archive_due_at <= now:
                out.append(DueEvent(ARCHIVE_CHANNEL, channel.archive_due_at, channel.nook_id))
        out.sort(key=DueEvent.sort_key)
        return out

    def next_due(self, now: datetime) -> datetime | None:
        """Earliest instant at which tick() would have new work."""
        candidates: list[datetime] = []
        schedule = self.state.schedule
        day = self._next_unopened()
        if day is not None:
            opens = schedule.incubation_opens_at(day)
            while opens <= now:
                day += timedelta(days=1)
                opens = schedule.incubation_opens_at(day)
            candidates.append(opens)
        batch_dates = {n.batch_date for n in self.state.current_incubating()}
        batch_dates.update(
            n.batch_date for n in self.state.nooks.values() if n.state is NookState.QUEUED
        )
        for batch_date in batch_dates:
            due = schedule.activation_instant(batch_date)
            if due > now:
                candidates.append(due)
        for channel in self.state.channels.values():
            if not channel.archived and not channel.persistent and channel.archive_due_at > now:
                candidates.append(channel.archive_due_at)
        pending = self.pending(now)
        if pending:
            candidates.append(pending[0].due_at)
        return min(candidates) if candidates else None

    # -- firing ---------------------------------------------------------------

    def tick(self, now: datetime) -> list[DueEvent]:
        """Fire everything due, oldest first. Returns what was fired.

        Adapter failures leave the occurrence pending (retried next tick);
        everything fired before the failure stays fired.
        """
        fired: list[DueEvent] = []
        while True:
            due = self.pending(now)
            if not due:
                return fired
            event = due[0]
            try:
                self._fire(event, now)
            except AdapterError as exc:
                log.warning("scheduled %s %s failed, will retry: %s", event.kind, event.key, exc)
                return fired
            fired.append(event)

    def _fire(self, event: DueEvent, now: datetime) -> None:
        if event.kind == OPEN_INCUBATION:
            self._fire_open(date.fromisoformat(event.key), now)
        elif event.kind == ACTIVATE_BATCH:
            self._fire_activate(date.fromisoformat(event.key), now)
        else:
            self._fire_archive(event.key, now)

    def _fire_open(self, batch_date: date, now: datetime) -> None:
        nooks = self.state.queued_batch(batch_date)
        # One notice per member who has at least one visible card; nobody
        # hears about an empty (or fully-excluded-from) batch.
        for member in sorted(self.state.roster()):
            if visible_cards(member, nooks):
                self.adapter.send_direct(
                    member, texts.BATCH_NOTICE, now, dedupe_key=f"batch:{batch_date.isoformat()}"
                )
        self._record(
            ev.BATCH_OPENED,
            {"batch_date": batch_date.isoformat(), "nook_ids": [n.id for n in nooks]},
            now,
        )

    def _fire_activate(self, batch_date: date, now: datetime) -> None:
        schedule = self.state.schedule
        for nook in self.state.incubating_batch(batch_date):
            responses = self.state.responses.get(nook.id, {})
            outcome = compute_member_set(nook, responses, schedule, self.state.roster())
            if outcome.activated:
                ref = self._created.get(nook.id)
                if ref is None:
                    ref = self.adapter.create_private_channel(
                        nook.channel_title, set(outcome.members), now
                    )
                    self._created[nook.id] = ref
                self.adapter.post_as_bot(ref.handle, greeting_message(nook, schedule), now)
                archive_due = now + schedule.channel_lifetime
                self._record(
                    ev.NOOK_ACTIVATED,
                    {
                        "nook_id": nook.id,
                        "channel_ref": ref.handle,
                        "channel_name": ref.name,
                        "members": sorted(outcome.members),
                        "archive_due_at": archive_due.isoformat(),
                    },
                    now,
                )
                self._created.pop(nook.id, None)
            else:
                if nook.creator in self.state.roster():
                    self.adapter.send_direct(
                        nook.creator,
                        texts.not_activated_notice(nook.channel_title),
                        now,
                        dedupe_key=f"not-activated:{nook.id}",
                    )
                self._record(
                    ev.NOOK_NOT_ACTIVATED,
                    {"nook_id": nook.id, "reason": outcome.reason.value},
                    now,
                )

    def _fire_archive(self, nook_id: str, now: datetime) -> None:
        channel = self.state.channels[nook_id]
        try:
            self.adapter.archive(channel.channel_ref)
        except AlreadyArchived:
            pass  # a retry after a partial failure; archiving is idempotent
        for member in sorted(channel.members):
            self.adapter.send_direct(
                member,
                texts.archive_notice(channel.channel_name),
                now,
                dedupe_key=f"archived:{nook_id}",
            )
        self._record(ev.CHANNEL_ARCHIVED, {"nook_id": nook_id}, now)

    # -- restart -----------------------------------------------------------

    def reconcile(self, now: datetime) -> list[DueEvent]:
        """Repair after a restart: sync the platform store to persisted state.

        State itself was already rebuilt by folding the log (which raises
        CorruptState on a lifecycle the state machine forbids). Overdue
        occurrences are simply pending again and fire exactly once on the
        next tick.
        """
        if hasattr(self.adapter, "ensure_channel_membership"):
            # The localchat store may have been lost with the process;
            # durable platforms don't need this.
            for nook_id, channel in sorted(self.state.channels.items()):
                self.adapter.ensure_channel_membership(
                    channel.channel_name,
                    channel.channel_ref,
                    set(channel.members),
                    channel.archived,
                    channel.activated_at,
                )
        return self.pending(now)
