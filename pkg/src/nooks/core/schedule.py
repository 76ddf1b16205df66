"""Workspace temporal routine: batch cutoff, activation time, channel lifetime.

All schedule decisions are wall-clock decisions in the workspace timezone.
resolve_wall_time() pins down the DST corner cases: a nonexistent local time
(spring-forward gap) fires at the first valid instant after it, an ambiguous
one (fall-back) uses the earlier instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from zoneinfo import ZoneInfo

UTC = timezone.utc

DEFAULT_BATCH_CUTOFF = time(16, 0)
DEFAULT_ACTIVATION_TIME = time(12, 0)
DEFAULT_CHANNEL_LIFETIME = timedelta(hours=24)
DEFAULT_MIN_MEMBERS = 2


@dataclass(frozen=True)
class ScheduleConfig:
    timezone: str = "UTC"
    batch_cutoff: time = DEFAULT_BATCH_CUTOFF
    activation_time: time = DEFAULT_ACTIVATION_TIME
    channel_lifetime: timedelta = DEFAULT_CHANNEL_LIFETIME
    min_members_to_activate: int = DEFAULT_MIN_MEMBERS

    def __post_init__(self) -> None:
        ZoneInfo(self.timezone)  # raises on unknown zone names
        if self.batch_cutoff == self.activation_time:
            raise ValueError("batch_cutoff and activation_time must differ")
        if self.channel_lifetime <= timedelta(0):
            raise ValueError("channel_lifetime must be positive")
        if self.min_members_to_activate < 1:
            raise ValueError("min_members_to_activate must be >= 1")

    @property
    def zone(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)

    def local(self, instant: datetime) -> datetime:
        return instant.astimezone(self.zone)

    def incubation_opens_at(self, batch_date: date) -> datetime:
        """Instant the batch's cards go live: cutoff time on the batch day."""
        return resolve_wall_time(self.zone, batch_date, self.batch_cutoff)

    def activation_instant(self, batch_date: date) -> datetime:
        """Instant the batch launches: activation time on the following day."""
        return resolve_wall_time(
            self.zone, batch_date + timedelta(days=1), self.activation_time
        )


def resolve_wall_time(zone: ZoneInfo, day: date, wall: time) -> datetime:
    """UTC instant for a local wall-clock time, with deterministic DST rules."""
    naive = datetime.combine(day, wall)
    u0 = naive.replace(tzinfo=zone, fold=0).astimezone(UTC)
    u1 = naive.replace(tzinfo=zone, fold=1).astimezone(UTC)
    if u0 == u1:
        return u0
    if u0 < u1:
        # Ambiguous (clock fell back): two instants share this wall time; use
        # the earlier one.
        return u0
    # Nonexistent (clock sprang forward): u1 < u0 straddle the transition.
    # Binary-search the first instant on the post-transition offset.
    lo, hi = u1, u0
    off_before = lo.astimezone(zone).utcoffset()
    while hi - lo > timedelta(microseconds=1):
        mid = lo + (hi - lo) / 2
        if mid.astimezone(zone).utcoffset() == off_before:
            lo = mid
        else:
            hi = mid
    return hi


def assign_batch(created_at: datetime, schedule: ScheduleConfig) -> date:
    """Batch day for a creation instant.

    Strictly before the local cutoff joins that day's batch; at or after the
    cutoff joins the next day's. Total over all instants.
    """
    local = created_at.astimezone(schedule.zone)
    if local.time() < schedule.batch_cutoff:
        return local.date()
    return local.date() + timedelta(days=1)
