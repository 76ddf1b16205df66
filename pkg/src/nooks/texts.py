"""Every message the bot sends, in one place.

The batch notice wording is load-bearing (tests count and match it); the
rest can be reworded per workspace taste. None of these may ever name a
nook's creator.
"""

from __future__ import annotations

BATCH_NOTICE = (
    "Hello! I've updated your Nook Cards List for today. "
    "Head over to the Nooks Home Tab to see the cards for today!"
)


def invite_notice(code: str) -> str:
    return (
        "Hello! You've been invited to join Nooks, where you can start and join "
        "anonymous, time-boxed group conversations with your colleagues. "
        f"Sign up with invite code {code} to get started."
    )


def not_activated_notice(channel_title: str) -> str:
    return (
        f"Hello! Your nook '{channel_title}' didn't gather enough interest this "
        "time, so it wasn't started. Feel free to queue up another one!"
    )


def archive_notice(channel_name: str) -> str:
    return (
        f"The nook #{channel_name} has wrapped up and the channel is now "
        "archived. Open it and press Unarchive if you'd like to keep the "
        "conversation going."
    )
