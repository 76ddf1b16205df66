"""Pure domain core: types and lifecycle logic, no clock/storage/network."""

from nooks.core.encounters import EncounterHistory, encounter_counts, top_encounters
from nooks.core.model import (
    SYSTEM_CREATOR,
    ChannelRecord,
    Choice,
    InterestResponse,
    MemberProfile,
    Nook,
    NookCard,
    NookDraft,
    NookOrigin,
    NookState,
    NotActivatedReason,
    UserId,
)
from nooks.core.ops import (
    ActivationOutcome,
    DomainError,
    ExcludedUserError,
    NotIncubatingError,
    NotOnboardedError,
    ResponseWindowClosedError,
    ValidationError,
    compute_member_set,
    greeting_message,
    record_response,
    validate_draft,
    visible_cards,
)
from nooks.core.samples import DEFAULT_SAMPLES, sample_page
from nooks.core.schedule import ScheduleConfig, assign_batch, resolve_wall_time

__all__ = [
    "ActivationOutcome",
    "ChannelRecord",
    "Choice",
    "DEFAULT_SAMPLES",
    "DomainError",
    "EncounterHistory",
    "ExcludedUserError",
    "InterestResponse",
    "MemberProfile",
    "Nook",
    "NookCard",
    "NookDraft",
    "NookOrigin",
    "NookState",
    "NotActivatedReason",
    "NotIncubatingError",
    "NotOnboardedError",
    "ResponseWindowClosedError",
    "SYSTEM_CREATOR",
    "ScheduleConfig",
    "UserId",
    "ValidationError",
    "assign_batch",
    "compute_member_set",
    "encounter_counts",
    "greeting_message",
    "record_response",
    "resolve_wall_time",
    "sample_page",
    "top_encounters",
    "validate_draft",
    "visible_cards",
]
