"""Clock sources. Everything time-driven takes one of these, never wall time."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Protocol

UTC = timezone.utc


class Clock(Protocol):
    def now(self) -> datetime: ...


class SystemClock:
    kind = "system"

    def now(self) -> datetime:
        return datetime.now(UTC)


class VirtualClock:
    """Test/sim clock; advances only when told to, never backwards."""

    kind = "virtual"

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("virtual clock needs an aware start instant")
        self._now = start.astimezone(UTC)

    def now(self) -> datetime:
        return self._now

    def set(self, instant: datetime) -> None:
        instant = instant.astimezone(UTC)
        if instant < self._now:
            raise ValueError("virtual clock cannot go backwards")
        self._now = instant

    def advance(self, delta) -> datetime:
        self.set(self._now + delta)
        return self._now
