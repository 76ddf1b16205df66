"""Workspace service: command execution over the event log.

One Workspace owns one data directory: the event store, the localchat
platform store, the folded state, and the scheduler. Commands validate
against state, run adapter effects, then append-and-apply events; a mutex
plus an on-disk writer lock serialize all writes, which also gives every
session read-your-own-writes.
"""

from __future__ import annotations

import hashlib
import re
import threading
from datetime import date, datetime, timezone
from typing import Any, Callable, Iterable

from filelock import FileLock, Timeout

from nooks import events as ev
from nooks import texts
from nooks.adapter import ChannelArchived, UnknownChannel, UnknownUser
from nooks.clock import Clock, SystemClock
from nooks.config import WorkspaceConfig
from nooks.core.model import (
    MAX_TITLE_LEN,
    SYSTEM_CREATOR,
    TITLE_RE,
    Choice,
    Nook,
    NookDraft,
    NookOrigin,
    UserId,
)
from nooks.core.encounters import top_encounters
from nooks.core.ops import (
    DomainError,
    ExcludedUserError,
    NotOnboardedError,
    record_response,
    validate_draft,
    visible_cards,
)
from nooks.core.samples import DEFAULT_SAMPLES, sample_page
from nooks.core.schedule import ScheduleConfig, assign_batch
from nooks.eventlog import SNAPSHOT_EVERY, EventStore
from nooks.export import build_participation_log
from nooks.localchat import LocalChat
from nooks.scheduler import DueEvent, Scheduler
from nooks.state import WorkspaceState, fold, schedule_to_doc, to_doc, from_doc

UTC = timezone.utc


class UnknownResource(DomainError):
    code = "UnknownResource"


class ConsentRequired(DomainError):
    code = "ConsentRequired"


class AlreadyOnboarded(DomainError):
    code = "AlreadyOnboarded"


class UnknownInviteCode(DomainError):
    code = "UnknownInviteCode"


class ValidationFailed(DomainError):
    code = "ValidationFailed"

    def __init__(self, errors):
        super().__init__("draft has validation errors")
        self.errors = errors


class WorkspaceLocked(DomainError):
    code = "WorkspaceLocked"


class SeedEntryInvalid(DomainError):
    code = "SeedEntryInvalid"


_SLUG_STRIP_RE = re.compile(r"[^a-z-]+")


def slugify_title(topic: str) -> str:
    slug = _SLUG_STRIP_RE.sub("-", topic.lower()).strip("-")
    slug = re.sub(r"-{2,}", "-", slug)
    return slug[:59].rstrip("-") or "predefined-nook"


class Workspace:
    def __init__(
        self,
        config: WorkspaceConfig,
        store: EventStore,
        adapter: LocalChat,
        state: WorkspaceState,
        clock: Clock,
        lock: FileLock | None = None,
    ):
        self.config = config
        self.store = store
        self.adapter = adapter
        self.state = state
        self.clock = clock
        self._lock = lock
        self._mutex = threading.RLock()
        # test hook: called with the sequence just written, right after the
        # append is durable and before it is applied (a crash point)
        self.after_append: Callable[[int], None] | None = None
        self.scheduler = Scheduler(state, store, adapter, self._record)

    # -- lifecycle ----------------------------------------------------------

    @classmethod
    def open(
        cls,
        config: WorkspaceConfig,
        clock: Clock | None = None,
        hold_lock: bool = True,
    ) -> "Workspace":
        clock = clock or SystemClock()
        wsdir = config.workspace_dir
        wsdir.mkdir(parents=True, exist_ok=True)
        lock = None
        if hold_lock:
            lock = FileLock(str(wsdir / ".writer.lock"))
            try:
                lock.acquire(timeout=2)
            except Timeout as exc:
                raise WorkspaceLocked(
                    f"another process is writing to {wsdir}"
                ) from exc

        store = EventStore(wsdir)
        adapter = LocalChat(wsdir / "localchat" / "store.json")
        for handle, display in config.platform_users:
            adapter.register_user(handle, display)

        snapshot = store.latest_snapshot()
        if snapshot is not None:
            upto, doc = snapshot
            state = from_doc(doc)
            fold(store.load(upto), state)
        else:
            state = fold(store.load(0))

        workspace = cls(config, store, adapter, state, clock, lock)
        now = clock.now()
        if store.next_sequence == 0:
            workspace._record(
                ev.CONFIG_CHANGED,
                {
                    "schedule": schedule_to_doc(config.schedule()),
                    "samples": [list(pair) for pair in DEFAULT_SAMPLES],
                },
                now,
            )
        for name, members in config.platform_channels:
            for handle in members:
                adapter.register_user(handle)
            try:
                adapter.channel_members(name)
            except UnknownChannel:
                adapter.create_channel(name, set(members), now, private=False)
        workspace.scheduler.reconcile(now)
        return workspace

    def close(self) -> None:
        if self._lock is not None:
            self._lock.release()
            self._lock = None

    # -- identity -------------------------------------------------------------

    def _digest(self, purpose: str, subject: str) -> str:
        return hashlib.sha256(
            f"{self.config.secret}:{purpose}:{subject}".encode()
        ).hexdigest()

    def invite_code_for(self, handle: str) -> str:
        return self._digest("invite", handle)[:12]

    def token_for(self, user: UserId) -> str:
        return "tk_" + self._digest("token", user)[:40]

    def user_for_token(self, token: str) -> UserId | None:
        for user in self.state.members:
            if self.token_for(user) == token:
                return user
        return None

    def is_admin_token(self, token: str) -> bool:
        return token == self.config.effective_admin_token

    def _require_member(self, user: UserId):
        profile = self.state.members.get(user)
        if profile is None or not profile.consented:
            raise NotOnboardedError("sign up and consent before using nooks")
        return profile

    def _display_name(self, user: UserId) -> str:
        profile = self.state.members.get(user)
        if profile is not None:
            return profile.display_name
        return self.adapter.display_name(user)

    # -- event plumbing ---------------------------------------------------------

    def _record(self, event_type: str, data: dict[str, Any], occurred_at: datetime) -> ev.LogEvent:
        seq = self.store.append(event_type, data, occurred_at)
        if self.after_append is not None:
            self.after_append(seq)
        event = ev.LogEvent(seq, occurred_at, event_type, data)
        self.state.apply(event)
        if (seq + 1) % SNAPSHOT_EVERY == 0:
            self.store.write_snapshot(seq + 1, to_doc(self.state))
        return event

    # -- onboarding ---------------------------------------------------------

    def onboard(self, channel: str | None = None, users: Iterable[str] | None = None) -> list[str]:
        """Invite platform users by DM; idempotent per user."""
        with self._mutex:
            if channel is not None:
                targets = sorted(self.adapter.channel_members(channel))
            else:
                targets = sorted(set(users or []))
                for handle in targets:
                    if not self.adapter.has_user(handle):
                        raise UnknownUser(f"no such user {handle!r}")
            now = self.clock.now()
            invited = []
            for handle in targets:
                profile = self.state.members.get(handle)
                if profile is not None and profile.consented:
                    continue
                self.adapter.send_direct(
                    handle,
                    texts.invite_notice(self.invite_code_for(handle)),
                    now,
                    dedupe_key=f"invite:{handle}",
                )
                invited.append(handle)
            return invited

    def signup(
        self,
        invite_code: str,
        display_name: str,
        demographics: dict[str, str] | None,
        consent: bool,
    ) -> dict[str, Any]:
        with self._mutex:
            handle = next(
                (
                    h
                    for h in sorted(self.adapter.users)
                    if self.invite_code_for(h) == invite_code
                ),
                None,
            )
            if handle is None:
                raise UnknownInviteCode("that invite code is not valid here")
            if not consent:
                raise ConsentRequired("signing up requires consenting to the data policy")
            now = self.clock.now()
            profile = self.state.members.get(handle)
            if profile is None:
                self._record(
                    ev.MEMBER_ONBOARDED,
                    {
                        "user_id": handle,
                        "display_name": display_name or self.adapter.display_name(handle),
                        "demographics": dict(demographics or {}),
                    },
                    now,
                )
            elif profile.consented:
                raise AlreadyOnboarded("this invite was already used to sign up")
            self._record(ev.CONSENT_RECORDED, {"user_id": handle}, now)
            return {
                "user_id": handle,
                "display_name": self.state.members[handle].display_name,
                "token": self.token_for(handle),
            }

    # -- nooks ----------------------------------------------------------------

    def create_nook(
        self,
        user: UserId,
        topic: str,
        initial_thoughts: str,
        channel_title: str,
        excluded: Iterable[UserId] = (),
        require_two_others: bool = False,
    ) -> Nook:
        with self._mutex:
            self._require_member(user)
            draft = NookDraft(
                creator=user,
                topic=topic,
                initial_thoughts=initial_thoughts,
                channel_title=channel_title,
                excluded=frozenset(excluded),
                require_two_others=require_two_others,
            )
            errors = validate_draft(draft, self.state.roster())
            if errors:
                raise ValidationFailed(errors)
            now = self.clock.now()
            batch = assign_batch(now, self.state.schedule)
            nook_id = self.state.next_nook_id()
            self._record(
                ev.NOOK_CREATED,
                {
                    "nook_id": nook_id,
                    "creator": user,
                    "topic": topic,
                    "initial_thoughts": initial_thoughts,
                    "channel_title": channel_title,
                    "excluded": sorted(draft.excluded),
                    "require_two_others": require_two_others,
                    "origin": NookOrigin.MEMBER.value,
                    "batch_date": batch.isoformat(),
                },
                now,
            )
            return self.state.nooks[nook_id]

    def create_predefined(self, entries: list[dict[str, Any]]) -> list[Nook]:
        """Admin-seeded nooks with a synthetic creator and assigned batch days."""
        with self._mutex:
            now = self.clock.now()
            schedule = self.state.schedule
            prepared = []
            for entry in entries:
                topic = (entry.get("topic") or "").strip()
                if not topic:
                    raise SeedEntryInvalid("a predefined nook needs a topic")
                batch_raw = entry.get("batch_date")
                if not batch_raw:
                    raise SeedEntryInvalid(f"nook {topic!r} needs a batch_date")
                batch = (
                    batch_raw
                    if isinstance(batch_raw, date)
                    else date.fromisoformat(str(batch_raw))
                )
                if batch in self.state.batches_opened or schedule.incubation_opens_at(batch) <= now:
                    raise SeedEntryInvalid(
                        f"batch {batch.isoformat()} has already opened; pick a later day"
                    )
                title = entry.get("channel_title") or slugify_title(topic)
                if len(title) >= MAX_TITLE_LEN or not TITLE_RE.fullmatch(title):
                    raise SeedEntryInvalid(
                        f"channel title {title!r} must be under {MAX_TITLE_LEN} letters/dashes"
                    )
                prepared.append((topic, entry.get("initial_thoughts") or "", title, batch))
            created = []
            for topic, thoughts, title, batch in prepared:
                nook_id = self.state.next_nook_id()
                self._record(
                    ev.NOOK_CREATED,
                    {
                        "nook_id": nook_id,
                        "creator": SYSTEM_CREATOR,
                        "topic": topic,
                        "initial_thoughts": thoughts,
                        "channel_title": title,
                        "excluded": [],
                        "require_two_others": False,
                        "origin": NookOrigin.PREDEFINED.value,
                        "batch_date": batch.isoformat(),
                    },
                    now,
                )
                created.append(self.state.nooks[nook_id])
            return created

    def respond(self, user: UserId, nook_id: str, choice: Choice) -> None:
        with self._mutex:
            self._require_member(user)
            nook = self.state.nooks.get(nook_id)
            if nook is None:
                raise UnknownResource(f"no nook {nook_id}")
            now = self.clock.now()
            record_response(
                nook,
                self.state.responses.get(nook_id, {}),
                user,
                choice,
                now,
                self.state.schedule,
            )
            self._record(
                ev.RESPONSE_RECORDED,
                {"nook_id": nook_id, "user_id": user, "choice": choice.value},
                now,
            )

    # -- home / samples ---------------------------------------------------------

    def home(self, user: UserId) -> dict[str, Any]:
        with self._mutex:
            self._require_member(user)
            incubating = self.state.current_incubating()
            cards = []
            for card in visible_cards(user, incubating):
                nook = self.state.nooks[card.nook_id]
                mine = self.state.responses.get(card.nook_id, {}).get(user)
                cards.append(
                    {
                        "card": card.payload(),
                        "my_response": mine.choice.value if mine else None,
                        "respond_by": self.state.schedule.activation_instant(
                            nook.batch_date
                        ).isoformat(),
                    }
                )
            encounters = [
                {
                    "user_id": other,
                    "display_name": self._display_name(other),
                    "count": count,
                }
                for other, count in top_encounters(
                    self.state.encounter_history(), user, k=10
                )
            ]
            return {
                "cards": cards,
                "samples": self.samples_page(0),
                "encounters": encounters,
            }

    def samples_page(self, page: int) -> dict[str, Any]:
        samples = self.state.samples or list(DEFAULT_SAMPLES)
        items = sample_page(page, samples)
        return {
            "page": page,
            "samples": [{"topic": t, "initial_thoughts": i} for t, i in items],
        }

    # -- channels ----------------------------------------------------------------

    def _member_channel(self, user: UserId, nook_id: str):
        """Channel record if the user is a member; 'not found' otherwise.

        Non-members get the same answer as for a channel that does not
        exist, so private channels stay undiscoverable.
        """
        record = self.state.channels.get(nook_id)
        if record is None or user not in record.members:
            raise UnknownResource(f"no channel {nook_id}")
        return record

    def my_channels(self, user: UserId) -> list[dict[str, Any]]:
        with self._mutex:
            self._require_member(user)
            out = []
            for record in sorted(
                self.state.channels.values(), key=lambda c: (c.activated_at, c.nook_id)
            ):
                if user not in record.members:
                    continue
                nook = self.state.nooks[record.nook_id]
                out.append(
                    {
                        "nook_id": record.nook_id,
                        "name": record.channel_name,
                        "topic": nook.topic,
                        "members": sorted(record.members),
                        "activated_at": record.activated_at.isoformat(),
                        "archive_due_at": record.archive_due_at.isoformat(),
                        "archived": record.archived,
                        "persistent": record.persistent,
                    }
                )
            return out

    def channel_messages(self, user: UserId, nook_id: str) -> list[dict[str, Any]]:
        with self._mutex:
            self._require_member(user)
            record = self._member_channel(user, nook_id)
            return [
                {
                    "id": m.message_id,
                    "author": m.author,
                    "author_display": self._display_name(m.author),
                    "body": m.body,
                    "posted_at": m.posted_at.isoformat(),
                }
                for m in self.adapter.messages(record.channel_ref, user)
            ]

    def post_channel_message(self, user: UserId, nook_id: str, body: str) -> dict[str, Any]:
        with self._mutex:
            self._require_member(user)
            record = self._member_channel(user, nook_id)
            if record.archived:
                raise ChannelArchived(f"channel {record.channel_name} is archived")
            message = self.adapter.post_message(record.channel_ref, user, body, self.clock.now())
            return {
                "id": message.message_id,
                "author": message.author,
                "body": message.body,
                "posted_at": message.posted_at.isoformat(),
            }

    def unarchive_channel(self, user: UserId, nook_id: str) -> dict[str, Any]:
        with self._mutex:
            self._require_member(user)
            record = self._member_channel(user, nook_id)
            # localchat raises AlreadyActive when it is not archived
            self.adapter.unarchive(record.channel_ref, user)
            self._record(
                ev.CHANNEL_UNARCHIVED,
                {"nook_id": nook_id, "unarchived_by": user},
                self.clock.now(),
            )
            updated = self.state.channels[nook_id]
            return {"nook_id": nook_id, "archived": updated.archived, "persistent": updated.persistent}

    def add_channel_member(self, user: UserId, nook_id: str, invitee: UserId) -> dict[str, Any]:
        with self._mutex:
            self._require_member(user)
            record = self._member_channel(user, nook_id)
            nook = self.state.nooks[nook_id]
            invitee_profile = self.state.members.get(invitee)
            if invitee_profile is None or not invitee_profile.consented:
                raise UnknownUser("that user is not an onboarded member")
            if invitee in nook.excluded:
                raise ExcludedUserError("that member cannot be added to this nook")
            if record.archived:
                raise ChannelArchived("this nook has been archived")
            self.adapter.add_member(record.channel_ref, user, invitee)
            self._record(
                ev.MEMBER_ADDED_TO_CHANNEL,
                {"nook_id": nook_id, "inviter": user, "invitee": invitee},
                self.clock.now(),
            )
            return {"nook_id": nook_id, "members": sorted(self.state.channels[nook_id].members)}

    # -- direct messages ----------------------------------------------------------

    def send_direct_message(self, sender: UserId, recipient: UserId, body: str) -> None:
        with self._mutex:
            self._require_member(sender)
            if recipient not in self.state.members:
                raise UnknownResource(f"no member {recipient}")
            self.adapter.send_user_direct(sender, recipient, body, self.clock.now())

    def inbox(self, user: UserId) -> list[dict[str, Any]]:
        with self._mutex:
            self._require_member(user)
            return [
                {"from": m["from"], "text": m["text"], "at": m["at"]}
                for m in self.adapter.inbox(user)
            ]

    def member_directory(self) -> list[dict[str, str]]:
        """Consented members, for exclusion pickers and the DM panel."""
        with self._mutex:
            return [
                {"user_id": u, "display_name": self.state.members[u].display_name}
                for u in sorted(self.state.roster())
            ]

    # -- admin ---------------------------------------------------------------------

    def set_schedule(self, **overrides: Any) -> None:
        with self._mutex:
            current = self.state.schedule
            updated = {
                "timezone": overrides.get("timezone", current.timezone),
                "batch_cutoff": overrides.get("batch_cutoff", current.batch_cutoff),
                "activation_time": overrides.get("activation_time", current.activation_time),
                "channel_lifetime": overrides.get("channel_lifetime", current.channel_lifetime),
                "min_members_to_activate": overrides.get(
                    "min_members_to_activate", current.min_members_to_activate
                ),
            }
            schedule = ScheduleConfig(**updated)
            self._record(
                ev.CONFIG_CHANGED,
                {"schedule": schedule_to_doc(schedule)},
                self.clock.now(),
            )

    def set_samples(self, samples: list[tuple[str, str]]) -> None:
        with self._mutex:
            if not samples:
                raise SeedEntryInvalid("the sample list cannot be empty")
            self._record(
                ev.CONFIG_CHANGED,
                {"samples": [[t, i] for t, i in samples]},
                self.clock.now(),
            )

    def export_participation_log(self, include_demographics: bool = False) -> str:
        with self._mutex:
            return build_participation_log(
                self.store.load(0), include_demographics=include_demographics
            )

    # -- scheduling --------------------------------------------------------------

    def tick(self, now: datetime | None = None) -> list[DueEvent]:
        with self._mutex:
            return self.scheduler.tick(now if now is not None else self.clock.now())

    def next_due(self, now: datetime | None = None) -> datetime | None:
        with self._mutex:
            return self.scheduler.next_due(now if now is not None else self.clock.now())
