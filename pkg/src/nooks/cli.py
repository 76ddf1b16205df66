"""nooksctl: operator tooling for a nooks workspace.

Commands run directly against the data directory (guarded by the writer
lock), so stop the server first or point at its config and accept a short
wait. `sim` drives the whole stack on a virtual clock and is the backbone
of the acceptance scenarios.
"""

from __future__ import annotations

import hashlib
import sys
from datetime import date
from pathlib import Path

import click
import uvicorn

from nooks.adapter import AdapterError
from nooks.api import create_app
from nooks.config import ConfigError, WorkspaceConfig, config_from_env, load_config, parse_duration
from nooks.core.ops import DomainError
from nooks.service import Workspace
from nooks.sim import ScenarioError, run_scenario_file


class SeedFileError(click.ClickException):
    exit_code = 2


def _load(config_path: str | None) -> WorkspaceConfig:
    try:
        if config_path:
            return load_config(config_path)
        return config_from_env()
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


def _open(cfg: WorkspaceConfig) -> Workspace:
    try:
        return Workspace.open(cfg)
    except DomainError as exc:
        raise click.ClickException(str(exc)) from exc


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True), default=None,
    help="Config file (defaults to $NOOKS_CONFIG).",
)


@click.group()
def main() -> None:
    """Operate a nooks workspace."""


@main.command()
@config_option
def install(config_path: str | None) -> None:
    """Create the data directory and initialize the workspace."""
    cfg = _load(config_path)
    ws = _open(cfg)
    ws.close()
    click.echo(f"workspace {cfg.workspace_id!r} ready at {cfg.workspace_dir}")
    click.echo(f"admin token: {cfg.effective_admin_token}")


@main.command()
@config_option
def serve(config_path: str | None) -> None:
    """Run the HTTP service (and background scheduler)."""
    cfg = _load(config_path)
    ws = _open(cfg)
    app = create_app(ws, static_dir=cfg.static_dir)

    import threading
    import time as _time

    def ticker() -> None:
        while True:
            _time.sleep(30)  # cadence is irrelevant to correctness
            try:
                ws.tick()
            except Exception as exc:  # keep the loop alive; effects retry
                click.echo(f"tick failed: {exc}", err=True)

    threading.Thread(target=ticker, daemon=True).start()
    ws.tick()
    uvicorn.run(app, host=cfg.listen_host, port=cfg.listen_port, log_level="info")


@main.command()
@click.option("--workspace", "workspace_id", default=None, help="Workspace id (sanity check).")
@click.option("--channel", "channel", default=None, help="Invite every member of this channel.")
@click.option("--users", "users", default=None, help="Comma-separated user handles to invite.")
@config_option
def onboard(workspace_id: str | None, channel: str | None, users: str | None,
            config_path: str | None) -> None:
    """Send sign-up invitations by direct message (idempotent per user)."""
    if (channel is None) == (users is None):
        raise click.UsageError("pass exactly one of --channel or --users")
    cfg = _load(config_path)
    if workspace_id is not None and workspace_id != cfg.workspace_id:
        raise click.UsageError(
            f"--workspace {workspace_id!r} does not match config ({cfg.workspace_id!r})"
        )
    ws = _open(cfg)
    try:
        invited = ws.onboard(
            channel=channel,
            users=[u.strip() for u in users.split(",")] if users else None,
        )
    except (DomainError, AdapterError) as exc:
        raise click.ClickException(str(exc)) from exc
    finally:
        ws.close()
    for handle in invited:
        click.echo(f"invited {handle}")
    click.echo(f"{len(invited)} invitation(s) sent")


def parse_seed_file(path: Path) -> list[dict]:
    """Predefined-nook seed file: `batch_date | topic [| initial thoughts]`."""
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) < 2 or len(parts) > 3:
            raise SeedFileError(
                f"{path}:{lineno}: expected 'batch_date | topic [| thoughts]'"
            )
        try:
            batch = date.fromisoformat(parts[0])
        except ValueError as exc:
            raise SeedFileError(f"{path}:{lineno}: bad date {parts[0]!r}") from exc
        if not parts[1]:
            raise SeedFileError(f"{path}:{lineno}: empty topic")
        entries.append(
            {
                "topic": parts[1],
                "initial_thoughts": parts[2] if len(parts) == 3 else "",
                "batch_date": batch,
            }
        )
    return entries


@main.command("seed-predefined")
@click.option("--file", "seed_file", type=click.Path(exists=True, path_type=Path), required=True)
@config_option
def seed_predefined(seed_file: Path, config_path: str | None) -> None:
    """Insert admin-defined nooks, each scheduled for a given batch day."""
    cfg = _load(config_path)
    entries = parse_seed_file(seed_file)
    marker = cfg.workspace_dir / "predefined.seeded"
    digest = hashlib.sha256(seed_file.read_bytes()).hexdigest()
    if marker.exists():
        raise click.ClickException(
            f"DuplicateSeed: this workspace was already seeded ({marker})"
        )
    ws = _open(cfg)
    try:
        created = ws.create_predefined(entries)
    except DomainError as exc:
        raise click.ClickException(str(exc)) from exc
    finally:
        ws.close()
    marker.write_text(digest + "\n", encoding="utf-8")
    for nook in created:
        click.echo(f"queued {nook.id} for {nook.batch_date.isoformat()}: {nook.topic}")


@main.command("set-schedule")
@click.option("--timezone", "tz", default=None)
@click.option("--batch-cutoff", default=None, help="Local time, e.g. 16:00")
@click.option("--activation-time", default=None, help="Local time, e.g. 12:00")
@click.option("--channel-lifetime", default=None, help="Duration, e.g. 24h")
@click.option("--min-members", type=int, default=None)
@config_option
def set_schedule(tz, batch_cutoff, activation_time, channel_lifetime, min_members,
                 config_path: str | None) -> None:
    """Change the workspace's temporal routine."""
    from datetime import time as time_type

    cfg = _load(config_path)
    overrides = {}
    if tz:
        overrides["timezone"] = tz
    if batch_cutoff:
        overrides["batch_cutoff"] = time_type.fromisoformat(batch_cutoff)
    if activation_time:
        overrides["activation_time"] = time_type.fromisoformat(activation_time)
    if channel_lifetime:
        overrides["channel_lifetime"] = parse_duration(channel_lifetime)
    if min_members is not None:
        overrides["min_members_to_activate"] = min_members
    if not overrides:
        raise click.UsageError("nothing to change")
    ws = _open(cfg)
    try:
        ws.set_schedule(**overrides)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    finally:
        ws.close()
    click.echo("schedule updated")


@main.command("export-log")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--include-demographics", is_flag=True, default=False)
@config_option
def export_log(out_path: Path | None, include_demographics: bool,
               config_path: str | None) -> None:
    """Write the participation log (never includes chat messages)."""
    cfg = _load(config_path)
    ws = _open(cfg)
    try:
        text = ws.export_participation_log(include_demographics=include_demographics)
    finally:
        ws.close()
    if out_path:
        out_path.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
def sim(scenario_path: Path, out_dir: Path) -> None:
    """Run a scenario end to end; exit 0 on pass, 1 on expectation failure."""
    try:
        report = run_scenario_file(scenario_path, out_dir)
    except ScenarioError as exc:
        click.echo(f"scenario error: {exc}", err=True)
        sys.exit(2)
    click.echo(report.text(), nl=False)
    sys.exit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
