"""Chat-platform capability surface the rest of the service builds on.

Deliberately minimal: channels, membership, bot posts, direct messages,
archive/unarchive. A real-platform binding implements this same interface;
only the localchat binding ships. Live message bodies stay on this side of
the line and never reach the event log.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime

from nooks.core.model import UserId

BOT = "nooks-bot"


class AdapterError(Exception):
    code = "AdapterError"

    def __init__(self, message: str | None = None):
        super().__init__(message or self.code)


class UnknownUser(AdapterError):
    code = "UnknownUser"


class UnknownChannel(AdapterError):
    code = "UnknownChannel"


class NotAMember(AdapterError):
    code = "NotAMember"


class AlreadyMember(AdapterError):
    code = "AlreadyMember"


class ChannelArchived(AdapterError):
    code = "ChannelArchived"


class AlreadyArchived(AdapterError):
    code = "AlreadyArchived"


class AlreadyActive(AdapterError):
    code = "AlreadyActive"


@dataclass(frozen=True)
class ChannelRef:
    handle: str
    name: str
    private: bool
    writable: bool


@dataclass(frozen=True)
class ChatMessage:
    channel: str  # channel handle
    author: str  # UserId or BOT
    body: str
    posted_at: datetime
    message_id: int


class ChatPlatform(ABC):
    """What the scheduler and API need from the hosting chat platform."""

    @abstractmethod
    def create_private_channel(
        self, name: str, members: set[UserId], at: datetime
    ) -> ChannelRef:
        """Create a members-only channel, adding everyone at once.

        Name collisions are resolved by suffixing -2, -3, ...; the returned
        ref carries the actual name.
        """

    @abstractmethod
    def post_as_bot(self, channel: str, text: str, at: datetime) -> ChatMessage: ...

    @abstractmethod
    def send_direct(
        self, user: UserId, text: str, at: datetime, dedupe_key: str | None = None
    ) -> bool:
        """Direct-message a user. Idempotent per (user, dedupe_key); returns
        False when deduplicated."""

    @abstractmethod
    def archive(self, channel: str) -> ChannelRef: ...

    @abstractmethod
    def unarchive(self, channel: str, requester: UserId) -> ChannelRef: ...

    @abstractmethod
    def add_member(self, channel: str, inviter: UserId, invitee: UserId) -> set[UserId]: ...

    @abstractmethod
    def post_message(
        self, channel: str, author: UserId, body: str, at: datetime
    ) -> ChatMessage: ...

    @abstractmethod
    def channel_members(self, channel: str) -> set[UserId]: ...

    @abstractmethod
    def channels_for(self, user: UserId) -> list[ChannelRef]: ...

    @abstractmethod
    def messages(self, channel: str, viewer: UserId) -> list[ChatMessage]: ...

    @abstractmethod
    def has_user(self, user: UserId) -> bool: ...
