from __future__ import annotations

from datetime import datetime
from zoneinfo import ZoneInfo

import pytest

from nooks.clock import VirtualClock
from nooks.config import WorkspaceConfig
from nooks.service import Workspace

ET = ZoneInfo("America/New_York")


def et(*args) -> datetime:
    return datetime(*args, tzinfo=ET)


def open_workspace(
    tmp_path,
    users: list[str],
    start: datetime,
    timezone: str = "America/New_York",
    signup: bool = True,
    **config_overrides,
):
    """Workspace on a virtual clock with the given platform users signed up."""
    cfg = WorkspaceConfig(
        data_dir=tmp_path / "data",
        timezone=timezone,
        platform_users=[(u, u.title()) for u in users],
        **config_overrides,
    )
    clock = VirtualClock(start)
    ws = Workspace.open(cfg, clock=clock)
    if signup:
        for user in users:
            ws.signup(ws.invite_code_for(user), user.title(), None, True)
    return ws, clock


def run_until(ws: Workspace, clock: VirtualClock, target: datetime) -> list:
    """Advance the clock to target, ticking at every scheduled instant."""
    fired = []
    while True:
        due = ws.next_due()
        if due is None or due > target:
            break
        clock.set(max(due, clock.now()))  # due work may already be overdue
        fired.extend(ws.tick())
    clock.set(target)
    fired.extend(ws.tick())
    return fired


@pytest.fixture
def workspace_factory(tmp_path):
    opened = []

    def factory(users, start, **kwargs):
        ws, clock = open_workspace(
            tmp_path / f"ws{len(opened)}", users, start, **kwargs
        )
        opened.append(ws)
        return ws, clock

    yield factory
    for ws in opened:
        ws.close()
