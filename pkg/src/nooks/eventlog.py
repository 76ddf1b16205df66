"""Append-only event store with snapshots.

On-disk layout, per workspace:

    <data_dir>/<workspace_id>/events.log
    <data_dir>/<workspace_id>/snapshots/<seq>.snap

events.log is newline-delimited; each record is

    <byte length> <crc32 hex> <json document>

so the file is greppable while still detecting truncation and bit rot.
Appends are fsynced before they are acknowledged. Snapshots are derived
state and can be deleted at any time; reconcile falls back to folding the
whole log.
"""

from __future__ import annotations

import errno
import json
import os
import zlib
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from nooks.events import LogEvent, check_payload

UTC = timezone.utc

SNAPSHOT_EVERY = 1000


class CorruptRecord(Exception):
    def __init__(self, sequence: int, detail: str):
        super().__init__(f"corrupt log record at sequence {sequence}: {detail}")
        self.sequence = sequence


class StorageFull(Exception):
    pass


def _encode(event: LogEvent) -> bytes:
    doc = json.dumps(
        {
            "seq": event.sequence,
            "at": event.occurred_at.astimezone(UTC).isoformat(),
            "type": event.type,
            "data": event.data,
        },
        sort_keys=True,
        ensure_ascii=False,
    ).encode("utf-8")
    crc = zlib.crc32(doc) & 0xFFFFFFFF
    return b"%d %08x " % (len(doc), crc) + doc + b"\n"


def _decode(line: bytes, expected_seq: int) -> LogEvent:
    try:
        length_raw, crc_raw, doc = line.split(b" ", 2)
        length = int(length_raw)
        crc = int(crc_raw, 16)
    except ValueError as exc:
        raise CorruptRecord(expected_seq, f"bad framing: {exc}") from exc
    if len(doc) != length:
        raise CorruptRecord(expected_seq, f"length {len(doc)} != declared {length}")
    if zlib.crc32(doc) & 0xFFFFFFFF != crc:
        raise CorruptRecord(expected_seq, "checksum mismatch")
    try:
        parsed = json.loads(doc.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptRecord(expected_seq, f"bad document: {exc}") from exc
    if parsed.get("seq") != expected_seq:
        raise CorruptRecord(expected_seq, f"sequence {parsed.get('seq')} out of order")
    return LogEvent(
        sequence=parsed["seq"],
        occurred_at=datetime.fromisoformat(parsed["at"]),
        type=parsed["type"],
        data=parsed["data"],
    )


class EventStore:
    """Single-writer durable log for one workspace."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.log_path = self.directory / "events.log"
        self.snapshot_dir = self.directory / "snapshots"
        self._next_seq = self._scan_next_seq()

    def _scan_next_seq(self) -> int:
        if not self.log_path.exists():
            return 0
        count = 0
        with self.log_path.open("rb") as fh:
            for _ in fh:
                count += 1
        return count

    @property
    def next_sequence(self) -> int:
        return self._next_seq

    def append(self, event_type: str, data: dict[str, Any], occurred_at: datetime) -> int:
        """Durably append one event; returns its sequence number."""
        check_payload(event_type, data)
        event = LogEvent(self._next_seq, occurred_at, event_type, data)
        record = _encode(event)
        try:
            with self.log_path.open("ab") as fh:
                fh.write(record)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull(str(exc)) from exc
            raise
        self._next_seq += 1
        return event.sequence

    def load(self, from_sequence: int = 0) -> list[LogEvent]:
        """All events with sequence >= from_sequence, in order."""
        if from_sequence < 0:
            raise ValueError("from_sequence must be >= 0")
        events: list[LogEvent] = []
        if not self.log_path.exists():
            return events
        with self.log_path.open("rb") as fh:
            for seq, raw in enumerate(fh):
                line = raw.rstrip(b"\n")
                if not line:
                    raise CorruptRecord(seq, "empty record")
                event = _decode(line, seq)
                if event.sequence >= from_sequence:
                    events.append(event)
        return events

    # -- snapshots --------------------------------------------------------

    def write_snapshot(self, upto_sequence: int, state_doc: dict[str, Any]) -> Path:
        """Persist derived state covering sequences [0, upto_sequence)."""
        self.snapshot_dir.mkdir(exist_ok=True)
        path = self.snapshot_dir / f"{upto_sequence:012d}.snap"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps({"upto": upto_sequence, "state": state_doc}, sort_keys=True),
            encoding="utf-8",
        )
        tmp.replace(path)
        return path

    def latest_snapshot(self) -> tuple[int, dict[str, Any]] | None:
        """Most recent readable snapshot, or None (snapshots are optional)."""
        if not self.snapshot_dir.is_dir():
            return None
        for path in sorted(self.snapshot_dir.glob("*.snap"), reverse=True):
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
                return int(doc["upto"]), doc["state"]
            except (json.JSONDecodeError, KeyError, ValueError, OSError):
                continue  # unreadable snapshots are ignored, not fatal
        return None
