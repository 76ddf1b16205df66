"""Lifecycle logic: draft validation, card visibility, responses, launch sets.

These functions are deterministic and side-effect-free; the service layer
feeds them snapshots and persists whatever they decide.
"""

from __future__ import annotations

from datetime import datetime

from nooks.core.model import (
    MAX_TITLE_LEN,
    TITLE_RE,
    Choice,
    InterestResponse,
    Nook,
    NookCard,
    NookDraft,
    NookState,
    NotActivatedReason,
    UserId,
)
from nooks.core.schedule import ScheduleConfig


class DomainError(Exception):
    """Base for refusals that map onto API/CLI error codes."""

    code = "DomainError"

    def __init__(self, message: str | None = None):
        super().__init__(message or self.code)


class ExcludedUserError(DomainError):
    code = "ExcludedUser"


class ResponseWindowClosedError(DomainError):
    code = "ResponseWindowClosed"


class NotIncubatingError(DomainError):
    code = "NotIncubating"


class NotOnboardedError(DomainError):
    code = "NotOnboarded"


# -- draft validation ---------------------------------------------------------


class ValidationError:
    """Field-level refusal of a draft; collected, not raised."""

    __slots__ = ("field", "code", "message")

    def __init__(self, field: str, code: str, message: str):
        self.field = field
        self.code = code
        self.message = message

    def as_dict(self) -> dict[str, str]:
        return {"field": self.field, "code": self.code, "message": self.message}

    def __repr__(self) -> str:  # pragma: no cover
        return f"ValidationError({self.field!r}, {self.code!r})"


def validate_draft(draft: NookDraft, roster: set[UserId]) -> list[ValidationError]:
    """Check a draft against the form rules. Empty list means valid.

    roster is the set of onboarded, consented member ids; exclusions must
    name real members.
    """
    errors: list[ValidationError] = []
    title = draft.channel_title
    if not title:
        errors.append(ValidationError("channel_title", "EmptyTitle", "add a channel title"))
    else:
        if len(title) >= MAX_TITLE_LEN:
            errors.append(
                ValidationError(
                    "channel_title",
                    "TitleTooLong",
                    f"use less than {MAX_TITLE_LEN} characters",
                )
            )
        if not TITLE_RE.fullmatch(title):
            errors.append(
                ValidationError(
                    "channel_title", "TitleBadCharset", "use only letters and dashes"
                )
            )
    if not draft.topic.strip():
        errors.append(ValidationError("topic", "EmptyTopic", "say what you want to talk about"))
    if draft.creator in draft.excluded:
        errors.append(
            ValidationError("excluded", "SelfExclusion", "you cannot exclude yourself")
        )
    for user in sorted(draft.excluded - {draft.creator}):
        if user not in roster:
            errors.append(
                ValidationError(
                    "excluded", "UnknownExcludedUser", f"{user} is not an onboarded member"
                )
            )
    return errors


# -- incubation ----------------------------------------------------------------


def visible_cards(viewer: UserId, batch: list[Nook]) -> list[NookCard]:
    """Cards the viewer sees for an incubating batch.

    Nooks excluding the viewer are dropped; order is creation time, ties by
    nook id. The card payload is identical for every viewer it reaches.
    """
    visible = [n for n in batch if viewer not in n.excluded]
    visible.sort(key=lambda n: (n.created_at, n.id))
    return [NookCard(n.id, n.topic, n.initial_thoughts) for n in visible]


def record_response(
    nook: Nook,
    responses: dict[UserId, InterestResponse],
    user: UserId,
    choice: Choice,
    now: datetime,
    schedule: ScheduleConfig,
) -> dict[UserId, InterestResponse]:
    """New response map with the user's latest choice for the nook.

    Later responses overwrite earlier ones; nothing is accepted at or after
    the batch's activation instant. Caller has already checked the user is
    onboarded and consented.
    """
    # error text stays id-free: API error bodies must never carry user ids
    if user in nook.excluded:
        raise ExcludedUserError("you are excluded from this nook")
    # Window before state: at the activation instant the nook may already be
    # activated, but the caller should hear "window closed", not "wrong state".
    if now >= schedule.activation_instant(nook.batch_date):
        raise ResponseWindowClosedError("this batch has already launched")
    if nook.state is not NookState.INCUBATING:
        raise NotIncubatingError(f"nook is {nook.state.value}, not incubating")
    updated = dict(responses)
    updated[user] = InterestResponse(nook.id, user, choice, now)
    return updated


# -- launch --------------------------------------------------------------------


class ActivationOutcome:
    """Either a member set to launch with, or a reason not to."""

    __slots__ = ("members", "reason")

    def __init__(
        self,
        members: frozenset[UserId] | None = None,
        reason: NotActivatedReason | None = None,
    ):
        assert (members is None) != (reason is None)
        self.members = members
        self.reason = reason

    @property
    def activated(self) -> bool:
        return self.members is not None

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ActivationOutcome)
            and self.members == other.members
            and self.reason == other.reason
        )

    def __repr__(self) -> str:  # pragma: no cover
        if self.members is not None:
            return f"Activate({sorted(self.members)})"
        return f"NotActivated({self.reason.value})"


def compute_member_set(
    nook: Nook,
    responses: dict[UserId, InterestResponse],
    schedule: ScheduleConfig,
    roster: set[UserId],
) -> ActivationOutcome:
    """Decide the launch member set at the activation instant.

    Everyone whose final choice is interested joins, plus the creator by
    default -- unless the creator explicitly opted out, or is not an
    onboarded member (admin-seeded nooks have a synthetic creator). The
    anonymity threshold and the workspace floor can veto the launch.
    """
    base = {u for u, r in responses.items() if r.choice is Choice.INTERESTED}
    creator_response = responses.get(nook.creator)
    creator_opted_out = (
        creator_response is not None and creator_response.choice is Choice.NOT_FOR_ME
    )
    if nook.creator in roster and not creator_opted_out:
        base.add(nook.creator)
    base -= nook.excluded
    if nook.require_two_others and len(base - {nook.creator}) < 2:
        return ActivationOutcome(reason=NotActivatedReason.INSUFFICIENT_OTHERS)
    if len(base) < schedule.min_members_to_activate:
        return ActivationOutcome(reason=NotActivatedReason.TOO_FEW_MEMBERS)
    return ActivationOutcome(members=frozenset(base))


# -- greeting ------------------------------------------------------------------


def format_wall_time(t) -> str:
    """12-hour clock like the bot writes it: 12PM, 9AM, 12:30PM."""
    hour = t.hour % 12 or 12
    suffix = "AM" if t.hour < 12 else "PM"
    if t.minute:
        return f"{hour}:{t.minute:02d}{suffix}"
    return f"{hour}{suffix}"


def greeting_message(nook: Nook, schedule: ScheduleConfig) -> str:
    """First bot post in a launched channel. Names the topic, never the creator."""
    when = format_wall_time(schedule.activation_time)
    closing = f"Remember this chat will be automatically archived at {when} tomorrow"
    thoughts = nook.initial_thoughts.strip()
    if thoughts:
        return (
            f"Super-excited to hear all of your thoughts on {nook.topic}. "
            f"{thoughts} {closing}"
        )
    return f"Super-excited to hear all of your thoughts on {nook.topic}. {closing}"
