"""Domain types for the nook lifecycle.

Everything in nooks.core is pure: no clock, no storage, no network. Instants
are timezone-aware UTC datetimes; local wall-clock arithmetic lives in
nooks.core.schedule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum

# A user id is an opaque non-empty string, unique per workspace. It is never
# derivable from any nook payload shown to other users.
UserId = str

# Synthetic creator id for admin-seeded nooks. Not an onboarded member, so it
# can never appear in a member set or receive a notification.
SYSTEM_CREATOR: UserId = "@system"

MAX_TITLE_LEN = 60

# "Letters and dashes" for channel titles: ASCII letters of either case plus
# '-'. Widen this regex if a deployment wants non-ASCII titles.
TITLE_RE = re.compile(r"^[A-Za-z-]+$")


class NookState(Enum):
    QUEUED = "queued"
    INCUBATING = "incubating"
    ACTIVATED = "activated"
    NOT_ACTIVATED = "not_activated"
    ARCHIVED = "archived"
    PERSISTENT = "persistent"


# Legal transitions; everything else is a state-machine violation.
STATE_EDGES: frozenset[tuple[NookState, NookState]] = frozenset(
    {
        (NookState.QUEUED, NookState.INCUBATING),
        (NookState.INCUBATING, NookState.ACTIVATED),
        (NookState.INCUBATING, NookState.NOT_ACTIVATED),
        (NookState.ACTIVATED, NookState.ARCHIVED),
        (NookState.ARCHIVED, NookState.PERSISTENT),
    }
)


class NookOrigin(Enum):
    MEMBER = "member"
    PREDEFINED = "predefined"


class Choice(Enum):
    INTERESTED = "interested"
    NOT_FOR_ME = "not_for_me"


class NotActivatedReason(Enum):
    INSUFFICIENT_OTHERS = "insufficient_others"
    TOO_FEW_MEMBERS = "too_few_members"


@dataclass(frozen=True)
class MemberProfile:
    user_id: UserId
    display_name: str
    consented: bool
    onboarded_at: datetime
    demographics: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class NookDraft:
    """What a member submits on the create form, before validation."""

    creator: UserId
    topic: str
    initial_thoughts: str
    channel_title: str
    excluded: frozenset[UserId] = frozenset()
    require_two_others: bool = False


@dataclass(frozen=True)
class Nook:
    id: str
    creator: UserId
    topic: str
    initial_thoughts: str
    channel_title: str
    excluded: frozenset[UserId]
    require_two_others: bool
    created_at: datetime
    batch_date: date
    state: NookState
    origin: NookOrigin = NookOrigin.MEMBER
    not_activated_reason: NotActivatedReason | None = None

    def with_state(
        self, new: NookState, reason: NotActivatedReason | None = None
    ) -> Nook:
        if (self.state, new) not in STATE_EDGES:
            raise ValueError(f"illegal nook transition {self.state.value} -> {new.value}")
        return Nook(
            id=self.id,
            creator=self.creator,
            topic=self.topic,
            initial_thoughts=self.initial_thoughts,
            channel_title=self.channel_title,
            excluded=self.excluded,
            require_two_others=self.require_two_others,
            created_at=self.created_at,
            batch_date=self.batch_date,
            state=new,
            origin=self.origin,
            not_activated_reason=reason if reason is not None else self.not_activated_reason,
        )


@dataclass(frozen=True)
class NookCard:
    """Incubation-time view of a nook.

    Exactly these three fields. No creator, no counts, no respondent
    identities -- the payload must be identical for every viewer.
    """

    nook_id: str
    topic: str
    initial_thoughts: str

    def payload(self) -> dict[str, str]:
        return {
            "nook_id": self.nook_id,
            "topic": self.topic,
            "initial_thoughts": self.initial_thoughts,
        }


@dataclass(frozen=True)
class InterestResponse:
    nook_id: str
    user_id: UserId
    choice: Choice
    responded_at: datetime


@dataclass(frozen=True)
class ChannelRecord:
    nook_id: str
    channel_ref: str
    channel_name: str
    members: frozenset[UserId]
    activated_at: datetime
    archive_due_at: datetime
    archived: bool = False
    persistent: bool = False
