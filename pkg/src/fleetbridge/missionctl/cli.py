"""fleetbridge command line: run, replay, export-geojson, relay, schema."""

from __future__ import annotations

import asyncio
import json
import logging
import os
import sys
from importlib.resources import files
from pathlib import Path

import click

from .. import messages
from ..relay.server import RelayServer
from .config import ConfigError, load_scenario
from .geojson_export import ExportError, export_geojson
from .interactive import DEFAULT_HTTP_PORT, run_interactive
from .mission_log import LogFormatError, load_log
from .runner import replay_log, run_mission


def _setup_logging() -> None:
    level = os.environ.get("FLEETBRIDGE_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _resolve_scenario(name: str) -> str:
    """Accept a path or the name of a bundled scenario."""
    if Path(name).exists():
        return name
    bundled = files("fleetbridge.missionctl") / "scenarios" / f"{name}.yaml"
    if bundled.is_file():
        return str(bundled)
    raise click.ClickException(
        f"no scenario file or bundled scenario named {name!r}")


@click.group()
def main() -> None:
    """Desk-scale multi-agent command, control, and supervision stack."""
    _setup_logging()


@main.command()
@click.argument("scenario")
@click.option("--headless/--interactive", default=True,
              help="Scripted headless run (default) or live console mode.")
@click.option("--seed", type=int, default=None, help="Override the world seed.")
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Write the mission log here (.ndjson or .ndjson.gz).")
@click.option("--metrics-out", type=click.Path(), default=None,
              help="Also write the metrics JSON to this path.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7601, show_default=True)
@click.option("--ws-port", default=7602, show_default=True)
@click.option("--http-port", default=7603, show_default=True)
@click.option("--console-port", default=DEFAULT_HTTP_PORT, show_default=True)
@click.option("--console-dir", type=click.Path(), default=None,
              help="Console bundle directory (defaults to ./frontend/dist).")
@click.option("--time-scale", default=1.0, show_default=True,
              help="Interactive pacing: 2.0 runs sim time at double speed.")
def run(scenario, headless, seed, log_path, metrics_out, host, port, ws_port,
        http_port, console_port, console_dir, time_scale):
    """Run SCENARIO (a YAML path or a bundled name like barrel_search)."""
    try:
        config = load_scenario(_resolve_scenario(scenario))
    except ConfigError as exc:
        raise click.ClickException(f"invalid scenario: {exc}")
    if headless:
        result = run_mission(config, log_path=log_path, seed=seed)
        click.echo(json.dumps(result.metrics, indent=2))
        click.echo(f"success={result.success} reason={result.reason} "
                   f"t_end={result.t_end:.1f}s wall={result.wall_seconds:.1f}s "
                   f"digest={result.final_digest}", err=True)
        if metrics_out:
            Path(metrics_out).write_text(json.dumps(result.metrics, indent=2))
        sys.exit(0 if result.success else 1)
    else:
        if console_dir is None:
            default_dir = Path.cwd() / "frontend" / "dist"
            console_dir = str(default_dir) if default_dir.is_dir() else None
        try:
            result = asyncio.run(run_interactive(
                config, host=host, port=port, ws_port=ws_port,
                http_port=http_port, console_port=console_port,
                console_dir=console_dir, log_path=log_path, seed=seed,
                time_scale=time_scale))
        except KeyboardInterrupt:
            raise click.ClickException("interrupted")
        click.echo(json.dumps(result, indent=2))
        sys.exit(0 if result["success"] else 1)


@main.command()
@click.argument("log_file", type=click.Path(exists=True))
def replay(log_file):
    """Re-simulate LOG_FILE and verify it tick by tick."""
    try:
        log = load_log(log_file)
    except LogFormatError as exc:
        raise click.ClickException(str(exc))
    report = replay_log(log)
    if report.ok:
        click.echo(f"replay OK: {report.ticks_checked} ticks verified, "
                   f"final digest {log.final_digest[:16]}")
        sys.exit(0)
    click.echo(f"replay FAILED at {report.first_divergence}", err=True)
    sys.exit(1)


@main.command("export-geojson")
@click.argument("log_file", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(), required=True)
def export_geojson_cmd(log_file, output):
    """Export agent positions and tracks from LOG_FILE as GeoJSON."""
    try:
        doc = export_geojson(load_log(log_file))
    except (LogFormatError, ExportError) as exc:
        raise click.ClickException(str(exc))
    Path(output).write_text(json.dumps(doc, indent=2))
    click.echo(f"wrote {len(doc['features'])} features to {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7601, show_default=True)
@click.option("--ws-port", default=7602, show_default=True)
@click.option("--http-port", default=7603, show_default=True)
def relay(host, port, ws_port, http_port):
    """Run the standalone message relay."""
    server = RelayServer(host=host, port=port, ws_port=ws_port,
                         http_port=http_port)
    click.echo(f"relay on tcp:{port} ws:{ws_port} http:{http_port} "
               f"(Ctrl+C to stop)", err=True)
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass


@main.command()
@click.option("-o", "--output", type=click.Path(), default="docs/wire-schema.md",
              show_default=True)
def schema(output):
    """Regenerate the wire schema document."""
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    Path(output).write_text(messages.render_schema_doc())
    click.echo(f"wrote {output}")
