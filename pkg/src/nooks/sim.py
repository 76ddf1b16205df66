"""Deterministic scenario runner: the full stack on a virtual clock.

Scenario files are plain text. Header lines declare the workspace; action
lines start with an offset from the scenario start (so scenarios are
timezone-portable); expect lines are checked after the script finishes.

    workspace demo
    timezone America/New_York
    start 2026-08-03 08:00
    seed 7

    member jose Jose
    member amy Amy

    +0m   create-nook jose label=mystery topic="mystery novels" \
              thoughts="Want to trade recommendations." title="mystery-novels"
    +9h   respond amy mystery interested
    +30h  post-message amy mystery "so excited!"
    +60h  advance

    expect nook mystery state=archived members=amy,jose

Verbs: create-nook, respond, post-message, unarchive, add-member, advance,
restart (tear the stack down and reopen it from disk, i.e. a crash). Two
runs of the same scenario produce byte-identical event logs and reports.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

from nooks.clock import VirtualClock
from nooks.config import WorkspaceConfig
from nooks.core.model import Choice
from nooks.service import Workspace

_OFFSET_PART = re.compile(r"(\d+)([dhms])")
_UNIT = {"d": 86400, "h": 3600, "m": 60, "s": 1}

ACTION_VERBS = {
    "create-nook",
    "respond",
    "post-message",
    "unarchive",
    "add-member",
    "advance",
    "restart",
}


class ScenarioError(Exception):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_offset(text: str, lineno: int) -> timedelta:
    if not text.startswith("+"):
        raise ScenarioError(lineno, f"offsets start with '+', got {text!r}")
    body = text[1:]
    parts = _OFFSET_PART.findall(body)
    if not parts or "".join(f"{n}{u}" for n, u in parts) != body:
        raise ScenarioError(lineno, f"bad offset {text!r} (use e.g. +30m, +28h, +1d4h)")
    return timedelta(seconds=sum(int(n) * _UNIT[u] for n, u in parts))


@dataclass
class Action:
    lineno: int
    offset: timedelta
    verb: str
    args: list[str]


@dataclass
class Expectation:
    lineno: int
    raw: str
    kind: str
    args: list[str]


@dataclass
class Scenario:
    workspace_id: str = "sim"
    timezone: str = "UTC"
    start_local: datetime = datetime(2026, 1, 5, 8, 0)
    seed: int = 0
    members: list[tuple[str, str]] = field(default_factory=list)
    actions: list[Action] = field(default_factory=list)
    expectations: list[Expectation] = field(default_factory=list)

    @property
    def start(self) -> datetime:
        return self.start_local.replace(tzinfo=ZoneInfo(self.timezone))


def parse_scenario(text: str) -> Scenario:
    scenario = Scenario()
    last_offset = timedelta(-1)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            raise ScenarioError(lineno, f"unbalanced quotes: {exc}") from exc
        head = tokens[0]
        if head == "workspace":
            scenario.workspace_id = tokens[1]
        elif head == "timezone":
            ZoneInfo(tokens[1])
            scenario.timezone = tokens[1]
        elif head == "start":
            scenario.start_local = datetime.fromisoformat(" ".join(tokens[1:]))
        elif head == "seed":
            scenario.seed = int(tokens[1])
        elif head == "member":
            if len(tokens) < 2:
                raise ScenarioError(lineno, "member needs a handle")
            scenario.members.append((tokens[1], " ".join(tokens[2:]) or tokens[1]))
        elif head == "expect":
            if len(tokens) < 2:
                raise ScenarioError(lineno, "empty expectation")
            scenario.expectations.append(Expectation(lineno, line, tokens[1], tokens[2:]))
        elif head.startswith("+"):
            offset = parse_offset(head, lineno)
            if offset < last_offset:
                raise ScenarioError(lineno, "actions must be time-ordered")
            last_offset = offset
            if len(tokens) < 2:
                raise ScenarioError(lineno, "offset without an action")
            verb = tokens[1]
            if verb not in ACTION_VERBS:
                raise ScenarioError(lineno, f"unknown action {verb!r}")
            scenario.actions.append(Action(lineno, offset, verb, tokens[2:]))
        else:
            raise ScenarioError(lineno, f"unrecognized line {line!r}")
    return scenario


def _kv(args: list[str]) -> dict[str, str]:
    out = {}
    for arg in args:
        if "=" in arg:
            key, _, value = arg.partition("=")
            out[key] = value
        else:
            out[arg] = "true"
    return out


@dataclass
class SimReport:
    passed: bool
    lines: list[str]
    events_path: Path | None = None

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class SimRunner:
    def __init__(self, scenario: Scenario, out_dir: str | Path):
        self.scenario = scenario
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.labels: dict[str, str] = {}  # scenario label -> nook id
        self.traffic: list[str] = []
        self.config = WorkspaceConfig(
            workspace_id=scenario.workspace_id,
            data_dir=self.out_dir / "data",
            secret=f"sim-{scenario.seed}",
            timezone=scenario.timezone,
            platform_users=list(scenario.members),
        )
        self.clock = VirtualClock(scenario.start)
        self.workspace: Workspace | None = None

    # -- driving ------------------------------------------------------------

    def _open(self) -> Workspace:
        self.workspace = Workspace.open(self.config, clock=self.clock)
        return self.workspace

    def _run_until(self, target: datetime) -> None:
        ws = self.workspace
        while True:
            due = ws.next_due()
            if due is None or due > target:
                break
            self.clock.set(max(due, self.clock.now()))  # due work may be overdue
            ws.tick()
        self.clock.set(target)
        ws.tick()

    def _resolve(self, label: str, lineno: int) -> str:
        nook_id = self.labels.get(label)
        if nook_id is None:
            raise ScenarioError(lineno, f"unknown nook label {label!r}")
        return nook_id

    def _execute(self, action: Action) -> None:
        ws = self.workspace
        if action.verb == "advance":
            return
        if action.verb == "restart":
            self.traffic.extend(ws.adapter.traffic)
            ws.close()
            self._open()
            return
        if action.verb == "create-nook":
            creator, kv = action.args[0], _kv(action.args[1:])
            label = kv.get("label")
            if not label:
                raise ScenarioError(action.lineno, "create-nook needs label=...")
            excluded = [u for u in kv.get("exclude", "").split(",") if u]
            nook = ws.create_nook(
                creator,
                kv.get("topic", ""),
                kv.get("thoughts", ""),
                kv.get("title", ""),
                excluded=excluded,
                require_two_others=kv.get("require-two-others") == "true",
            )
            self.labels[label] = nook.id
            return
        if action.verb == "respond":
            user, label, choice_raw = action.args
            choice = Choice.INTERESTED if choice_raw == "interested" else Choice.NOT_FOR_ME
            ws.respond(user, self._resolve(label, action.lineno), choice)
            return
        if action.verb == "post-message":
            user, label, body = action.args[0], action.args[1], " ".join(action.args[2:])
            ws.post_channel_message(user, self._resolve(label, action.lineno), body)
            return
        if action.verb == "unarchive":
            user, label = action.args
            ws.unarchive_channel(user, self._resolve(label, action.lineno))
            return
        if action.verb == "add-member":
            inviter, label, invitee = action.args
            ws.add_channel_member(inviter, self._resolve(label, action.lineno), invitee)
            return
        raise ScenarioError(action.lineno, f"unhandled verb {action.verb}")

    def run(self) -> SimReport:
        scenario = self.scenario
        ws = self._open()
        for handle, display in scenario.members:
            ws.signup(ws.invite_code_for(handle), display, None, True)
        for action in scenario.actions:
            self._run_until(scenario.start + action.offset)
            self._execute(action)
        ws = self.workspace

        lines: list[str] = []
        all_ok = True
        for expectation in scenario.expectations:
            ok, detail = self._check(expectation)
            all_ok &= ok
            status = "PASS" if ok else "FAIL"
            suffix = "" if ok else f"  ({detail})"
            lines.append(f"{status} {expectation.raw}{suffix}")
        lines.append(
            f"{'PASS' if all_ok else 'FAIL'}: "
            f"{sum(1 for l in lines if l.startswith('PASS'))}/{len(scenario.expectations)} expectations"
        )

        self.traffic.extend(ws.adapter.traffic)
        (self.out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        (self.out_dir / "traffic.txt").write_text(
            "\n".join(self.traffic) + ("\n" if self.traffic else ""), encoding="utf-8"
        )
        events_src = self.config.workspace_dir / "events.log"
        events_out = self.out_dir / "events.log"
        if events_src.exists():
            events_out.write_bytes(events_src.read_bytes())
        ws.close()
        return SimReport(all_ok, lines, events_out)

    # -- expectations ---------------------------------------------------------

    def _check(self, exp: Expectation) -> tuple[bool, str]:
        try:
            return self._check_inner(exp)
        except ScenarioError:
            raise
        except Exception as exc:  # a failed lookup is a failed expectation
            return False, f"{type(exc).__name__}: {exc}"

    def _check_inner(self, exp: Expectation) -> tuple[bool, str]:
        ws = self.workspace
        state = ws.state
        if exp.kind == "nook":
            label, kv = exp.args[0], _kv(exp.args[1:])
            nook = state.nooks[self._resolve(label, exp.lineno)]
            channel = state.channels.get(nook.id)
            for key, want in kv.items():
                if key == "state":
                    got = nook.state.value
                elif key == "reason":
                    got = nook.not_activated_reason.value if nook.not_activated_reason else ""
                elif key == "members":
                    got = ",".join(sorted(channel.members)) if channel else ""
                elif key == "activated-at":
                    want_instant = self.scenario.start + parse_offset(want, exp.lineno)
                    if channel is None or channel.activated_at != want_instant:
                        got_txt = channel.activated_at.isoformat() if channel else "never"
                        return False, f"activated-at {got_txt} != {want_instant.isoformat()}"
                    continue
                else:
                    raise ScenarioError(exp.lineno, f"unknown nook check {key!r}")
                if got != want:
                    return False, f"{key} {got!r} != {want!r}"
            return True, ""
        if exp.kind == "channel":
            label, kv = exp.args[0], _kv(exp.args[1:])
            channel = state.channels.get(self._resolve(label, exp.lineno))
            if channel is None:
                return False, "no channel"
            for key, want in kv.items():
                got = {"archived": channel.archived, "persistent": channel.persistent}.get(key)
                if got is None:
                    raise ScenarioError(exp.lineno, f"unknown channel check {key!r}")
                if str(got).lower() != want:
                    return False, f"{key} {got} != {want}"
            return True, ""
        if exp.kind == "dm-count":
            user, want = exp.args
            got = len(ws.adapter.inbox(user))
            return got == int(want), f"{user} has {got} DMs"
        if exp.kind == "dm":
            user = exp.args[0]
            assert exp.args[1] == "contains", "expect dm USER contains TEXT"
            needle = " ".join(exp.args[2:])
            hit = any(needle in m["text"] for m in ws.adapter.inbox(user))
            return hit, f"no DM to {user} contains {needle!r}"
        if exp.kind == "event-count":
            event_type, want = exp.args
            got = sum(1 for e in ws.store.load(0) if e.type == event_type)
            return got == int(want), f"{got} {event_type} events"
        if exp.kind == "encounter":
            from nooks.core.encounters import encounter_counts

            user, other, want = exp.args
            got = encounter_counts(state.encounter_history(), user).get(other, 0)
            return got == int(want), f"{user}-{other} encountered {got} times"
        raise ScenarioError(exp.lineno, f"unknown expectation kind {exp.kind!r}")


def run_scenario_file(path: str | Path, out_dir: str | Path) -> SimReport:
    scenario = parse_scenario(Path(path).read_text(encoding="utf-8"))
    return SimRunner(scenario, out_dir).run()
