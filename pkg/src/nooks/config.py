"""Workspace configuration file.

Plain key = value lines, # comments, repeatable platform_user /
platform_channel keys. `NOOKS_CONFIG` points tools at the file. Example:

    workspace_id = acme
    data_dir = /var/lib/nooks/acme
    listen = 127.0.0.1:8080
    secret = change-me
    timezone = America/New_York
    batch_cutoff = 16:00
    activation_time = 12:00
    channel_lifetime = 24h
    min_members_to_activate = 2
    static_dir = /opt/nooks/static
    platform_user = alice Alice Moreau
    platform_user = bob Bob Tran
    platform_channel = general alice bob
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from datetime import time, timedelta
from pathlib import Path

from nooks.core.schedule import ScheduleConfig

ENV_VAR = "NOOKS_CONFIG"

_DURATION_RE = re.compile(r"^(\d+)\s*(d|h|m|s)?$")
_UNIT_SECONDS = {"d": 86400, "h": 3600, "m": 60, "s": 1, None: 1}


class ConfigError(Exception):
    pass


def parse_duration(text: str) -> timedelta:
    match = _DURATION_RE.match(text.strip())
    if not match:
        raise ConfigError(f"bad duration {text!r} (use e.g. 24h, 90m, 3600s)")
    value, unit = match.groups()
    return timedelta(seconds=int(value) * _UNIT_SECONDS[unit])


@dataclass
class WorkspaceConfig:
    workspace_id: str = "default"
    data_dir: Path = Path("./nooks-data")
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    secret: str = "dev-secret"
    admin_token: str | None = None  # derived from secret when unset
    timezone: str = "UTC"
    batch_cutoff: time = time(16, 0)
    activation_time: time = time(12, 0)
    channel_lifetime: timedelta = timedelta(hours=24)
    min_members_to_activate: int = 2
    static_dir: Path | None = None
    platform_users: list[tuple[str, str]] = field(default_factory=list)
    platform_channels: list[tuple[str, list[str]]] = field(default_factory=list)

    def schedule(self) -> ScheduleConfig:
        return ScheduleConfig(
            timezone=self.timezone,
            batch_cutoff=self.batch_cutoff,
            activation_time=self.activation_time,
            channel_lifetime=self.channel_lifetime,
            min_members_to_activate=self.min_members_to_activate,
        )

    @property
    def effective_admin_token(self) -> str:
        if self.admin_token:
            return self.admin_token
        digest = hashlib.sha256(f"{self.secret}:admin".encode()).hexdigest()
        return f"admin_{digest[:40]}"

    @property
    def workspace_dir(self) -> Path:
        return self.data_dir / self.workspace_id


def load_config(path: str | Path) -> WorkspaceConfig:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    cfg = WorkspaceConfig()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            _apply(cfg, key, value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    cfg.schedule()  # validate the combination early
    return cfg


def _apply(cfg: WorkspaceConfig, key: str, value: str) -> None:
    if key == "workspace_id":
        cfg.workspace_id = value
    elif key == "data_dir":
        cfg.data_dir = Path(value)
    elif key == "listen":
        host, _, port = value.rpartition(":")
        cfg.listen_host = host or "127.0.0.1"
        cfg.listen_port = int(port)
    elif key == "secret":
        cfg.secret = value
    elif key == "admin_token":
        cfg.admin_token = value
    elif key == "timezone":
        cfg.timezone = value
    elif key == "batch_cutoff":
        cfg.batch_cutoff = time.fromisoformat(value)
    elif key == "activation_time":
        cfg.activation_time = time.fromisoformat(value)
    elif key == "channel_lifetime":
        cfg.channel_lifetime = parse_duration(value)
    elif key == "min_members_to_activate":
        cfg.min_members_to_activate = int(value)
    elif key == "static_dir":
        cfg.static_dir = Path(value)
    elif key == "platform_user":
        handle, _, display = value.partition(" ")
        cfg.platform_users.append((handle, display.strip() or handle))
    elif key == "platform_channel":
        parts = value.split()
        if len(parts) < 2:
            raise ConfigError("platform_channel needs a name and at least one member")
        cfg.platform_channels.append((parts[0], parts[1:]))
    else:
        raise ConfigError(f"unknown config key {key!r}")


def config_from_env() -> WorkspaceConfig:
    path = os.environ.get(ENV_VAR)
    if not path:
        raise ConfigError(f"set {ENV_VAR} or pass --config")
    return load_config(path)
