"""The shipped chat platform: an in-process channel/DM store.

Backs the web UI and every test. Messages live here and only here -- the
event log never sees them. The store can be given a file path so separate
processes (server, admin CLI) share platform state; message bodies still
never leave this file.
"""

from __future__ import annotations

import json
import re
from datetime import datetime
from pathlib import Path

from nooks.adapter import (
    BOT,
    AlreadyActive,
    AlreadyArchived,
    AlreadyMember,
    ChannelArchived,
    ChannelRef,
    ChatMessage,
    ChatPlatform,
    NotAMember,
    UnknownChannel,
    UnknownUser,
)
from nooks.core.model import UserId

_SUFFIX_RE = re.compile(r"-\d+$")


class LocalChat(ChatPlatform):
    def __init__(self, store_path: str | Path | None = None):
        self.store_path = Path(store_path) if store_path else None
        self.users: dict[str, str] = {}  # handle -> display name
        self.channels: dict[str, dict] = {}  # handle -> channel doc
        self.dms: dict[str, list[dict]] = {}  # user -> inbox
        self.traffic: list[str] = []  # per-process op journal (not persisted)
        self._next_channel = 1
        self._next_message = 1
        if self.store_path and self.store_path.exists():
            self._load()

    # -- store -------------------------------------------------------------

    def _load(self) -> None:
        doc = json.loads(self.store_path.read_text(encoding="utf-8"))
        self.users = doc["users"]
        self.channels = doc["channels"]
        self.dms = doc["dms"]
        self._next_channel = doc["next_channel"]
        self._next_message = doc["next_message"]

    def _save(self) -> None:
        if not self.store_path:
            return
        self.store_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.store_path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(
                {
                    "users": self.users,
                    "channels": self.channels,
                    "dms": self.dms,
                    "next_channel": self._next_channel,
                    "next_message": self._next_message,
                },
                sort_keys=True,
                ensure_ascii=False,
            ),
            encoding="utf-8",
        )
        tmp.replace(self.store_path)

    # -- directory ---------------------------------------------------------

    def register_user(self, handle: str, display_name: str | None = None) -> None:
        if not handle:
            raise UnknownUser("empty user handle")
        self.users.setdefault(handle, display_name or handle)
        if display_name:
            self.users[handle] = display_name
        self._save()

    def has_user(self, user: UserId) -> bool:
        return user in self.users

    def display_name(self, user: UserId) -> str:
        return self.users.get(user, user)

    # -- channels ----------------------------------------------------------

    def _ref(self, doc: dict) -> ChannelRef:
        return ChannelRef(
            handle=doc["handle"],
            name=doc["name"],
            private=doc["private"],
            writable=not doc["archived"],
        )

    def _channel(self, handle: str) -> dict:
        doc = self.channels.get(handle)
        if doc is None:
            raise UnknownChannel(f"no channel {handle!r}")
        return doc

    def _unique_name(self, name: str) -> str:
        taken = {c["name"] for c in self.channels.values()}
        if name not in taken:
            return name
        n = 2
        while f"{name}-{n}" in taken:
            n += 1
        return f"{name}-{n}"

    def create_channel(
        self, name: str, members: set[UserId], at: datetime, private: bool = True
    ) -> ChannelRef:
        if not members:
            raise UnknownUser("a channel needs at least one member")
        for user in members:
            if user not in self.users:
                raise UnknownUser(f"no such user {user!r}")
        handle = f"C{self._next_channel:04d}"
        self._next_channel += 1
        actual = self._unique_name(name)
        self.channels[handle] = {
            "handle": handle,
            "name": actual,
            "private": private,
            "archived": False,
            "members": sorted(members),
            "messages": [],
            "created_at": at.isoformat(),
        }
        self.traffic.append(f"channel-created {actual} members={','.join(sorted(members))}")
        self._save()
        return self._ref(self.channels[handle])

    def create_private_channel(
        self, name: str, members: set[UserId], at: datetime
    ) -> ChannelRef:
        return self.create_channel(name, members, at, private=True)

    def channel_members(self, channel: str) -> set[UserId]:
        # accepts a handle or (for public onboarding channels) a name
        doc = self.channels.get(channel)
        if doc is None:
            by_name = [c for c in self.channels.values() if c["name"] == channel]
            if not by_name:
                raise UnknownChannel(f"no channel {channel!r}")
            doc = by_name[0]
        return set(doc["members"])

    def channels_for(self, user: UserId) -> list[ChannelRef]:
        """Channels the user can see: their own private ones, all public ones."""
        out = []
        for doc in self.channels.values():
            if not doc["private"] or user in doc["members"]:
                out.append(self._ref(doc))
        out.sort(key=lambda ref: ref.handle)
        return out

    # -- messaging ---------------------------------------------------------

    def _append_message(self, doc: dict, author: str, body: str, at: datetime) -> ChatMessage:
        message = ChatMessage(
            channel=doc["handle"],
            author=author,
            body=body,
            posted_at=at,
            message_id=self._next_message,
        )
        self._next_message += 1
        doc["messages"].append(
            {"id": message.message_id, "author": author, "body": body, "at": at.isoformat()}
        )
        self._save()
        return message

    def post_as_bot(self, channel: str, text: str, at: datetime) -> ChatMessage:
        doc = self._channel(channel)
        if doc["archived"]:
            raise ChannelArchived(f"channel {doc['name']} is archived")
        self.traffic.append(f"bot-post {doc['name']}: {text}")
        return self._append_message(doc, BOT, text, at)

    def post_message(self, channel: str, author: UserId, body: str, at: datetime) -> ChatMessage:
        doc = self._channel(channel)
        if author not in doc["members"]:
            raise NotAMember(f"{author} is not in {doc['name']}")
        if doc["archived"]:
            raise ChannelArchived(f"channel {doc['name']} is archived")
        return self._append_message(doc, author, body, at)

    def send_direct(
        self, user: UserId, text: str, at: datetime, dedupe_key: str | None = None
    ) -> bool:
        if user not in self.users:
            raise UnknownUser(f"no such user {user!r}")
        inbox = self.dms.setdefault(user, [])
        if dedupe_key is not None and any(m.get("dedupe_key") == dedupe_key for m in inbox):
            return False
        inbox.append(
            {"from": BOT, "text": text, "at": at.isoformat(), "dedupe_key": dedupe_key}
        )
        self.traffic.append(f"dm {user}: {text}")
        self._save()
        return True

    def send_user_direct(self, sender: UserId, recipient: UserId, text: str, at: datetime) -> None:
        """Member-to-member DM (the encounter panel's "Send a message")."""
        if sender not in self.users:
            raise UnknownUser(f"no such user {sender!r}")
        if recipient not in self.users:
            raise UnknownUser(f"no such user {recipient!r}")
        self.dms.setdefault(recipient, []).append(
            {"from": sender, "text": text, "at": at.isoformat(), "dedupe_key": None}
        )
        self.traffic.append(f"user-dm {sender}->{recipient}")
        self._save()

    def inbox(self, user: UserId) -> list[dict]:
        return list(self.dms.get(user, []))

    def messages(self, channel: str, viewer: UserId) -> list[ChatMessage]:
        doc = self._channel(channel)
        if doc["private"] and viewer not in doc["members"]:
            raise NotAMember(f"{viewer} is not in {doc['name']}")
        return [
            ChatMessage(
                channel=doc["handle"],
                author=m["author"],
                body=m["body"],
                posted_at=datetime.fromisoformat(m["at"]),
                message_id=m["id"],
            )
            for m in doc["messages"]
        ]

    # -- lifecycle ---------------------------------------------------------

    def archive(self, channel: str) -> ChannelRef:
        doc = self._channel(channel)
        if doc["archived"]:
            raise AlreadyArchived(f"channel {doc['name']} is already archived")
        doc["archived"] = True
        self.traffic.append(f"channel-archived {doc['name']}")
        self._save()
        return self._ref(doc)

    def unarchive(self, channel: str, requester: UserId) -> ChannelRef:
        doc = self._channel(channel)
        if requester not in doc["members"]:
            raise NotAMember(f"{requester} is not in {doc['name']}")
        if not doc["archived"]:
            raise AlreadyActive(f"channel {doc['name']} is not archived")
        doc["archived"] = False
        self.traffic.append(f"channel-unarchived {doc['name']} by={requester}")
        self._save()
        return self._ref(doc)

    def add_member(self, channel: str, inviter: UserId, invitee: UserId) -> set[UserId]:
        doc = self._channel(channel)
        if inviter not in doc["members"]:
            raise NotAMember(f"{inviter} is not in {doc['name']}")
        if invitee not in self.users:
            raise UnknownUser(f"no such user {invitee!r}")
        if invitee in doc["members"]:
            raise AlreadyMember(f"{invitee} is already in {doc['name']}")
        doc["members"] = sorted(set(doc["members"]) | {invitee})
        self.traffic.append(f"member-added {doc['name']} +{invitee} by={inviter}")
        self._save()
        return set(doc["members"])

    def ensure_channel_membership(self, name: str, handle: str, members: set[UserId],
                                  archived: bool, at: datetime) -> ChannelRef:
        """Re-materialize a channel after a restart lost the platform store.

        Used by reconcile when the event log knows about a channel the
        platform no longer has (e.g. the store file was deleted). Messages
        are gone by design; membership and archive status are restored.
        """
        doc = self.channels.get(handle)
        if doc is None:
            for user in members:
                self.users.setdefault(user, user)
            doc = {
                "handle": handle,
                "name": name,  # already collision-resolved when first created
                "private": True,
                "archived": archived,
                "members": sorted(members),
                "messages": [],
                "created_at": at.isoformat(),
            }
            self.channels[doc["handle"]] = doc
            n = int(handle[1:]) if handle[1:].isdigit() else 0
            self._next_channel = max(self._next_channel, n + 1)
        else:
            doc["members"] = sorted(members)
            doc["archived"] = archived
        self._save()
        return self._ref(doc)
