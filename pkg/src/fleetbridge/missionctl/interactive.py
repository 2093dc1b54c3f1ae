"""Interactive mission mode: real-time sim plus live relay and console.

The same Orchestrator that powers headless runs is paced against the wall
clock; the relay's network listeners share its core, so browser consoles
join as ordinary clients.  UI-event envelopes arriving from consoles are
traced like scripted ones, which keeps interactive logs replayable.
"""

from __future__ import annotations

import asyncio
import json
import logging
import mimetypes
from pathlib import Path

from ..relay.server import RelayServer
from .config import ScenarioConfig
from .mission_log import MissionLogWriter
from .runner import Orchestrator, _script_feeds

log = logging.getLogger("fleetbridge.interactive")

DEFAULT_HTTP_PORT = 7680


class StaticServer:
    """Small asyncio file server for the console bundle."""

    def __init__(self, root: Path, host: str, port: int, ws_port: int):
        self.root = Path(root)
        self.host = host
        self.port = port
        self.ws_port = ws_port
        self._server = None

    async def start(self) -> None:
        self._server = await asyncio.start_server(self._client, self.host,
                                                  self.port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    def _resolve(self, path: str) -> Path | None:
        rel = path.lstrip("/") or "index.html"
        candidate = (self.root / rel).resolve()
        if not str(candidate).startswith(str(self.root.resolve())):
            return None
        if candidate.is_dir():
            candidate = candidate / "index.html"
        return candidate if candidate.is_file() else None

    async def _client(self, reader: asyncio.StreamReader,
                      writer: asyncio.StreamWriter) -> None:
        try:
            request = await asyncio.wait_for(reader.readline(), 10.0)
            while True:
                line = await asyncio.wait_for(reader.readline(), 10.0)
                if line in (b"\r\n", b"\n", b""):
                    break
            parts = request.decode("latin-1").split()
            path = parts[1].split("?")[0] if len(parts) >= 2 else "/"
            if path == "/config.json":
                body = json.dumps({"ws_port": self.ws_port}).encode()
                ctype = "application/json"
                status = "200 OK"
            else:
                target = self._resolve(path)
                if target is None:
                    body = b"not found\n"
                    ctype = "text/plain"
                    status = "404 Not Found"
                else:
                    body = target.read_bytes()
                    ctype = mimetypes.guess_type(str(target))[0] \
                        or "application/octet-stream"
                    status = "200 OK"
            writer.write(b"HTTP/1.1 " + status.encode() + b"\r\n"
                         b"Content-Type: " + ctype.encode() + b"\r\n"
                         b"Content-Length: " + str(len(body)).encode() + b"\r\n"
                         b"Cache-Control: no-store\r\n"
                         b"Connection: close\r\n\r\n" + body)
            await writer.drain()
        except (asyncio.TimeoutError, ConnectionResetError, IndexError):
            pass
        finally:
            writer.close()


async def run_interactive(config: ScenarioConfig, host: str = "127.0.0.1",
                          port: int = 7601, ws_port: int = 7602,
                          http_port: int = 7603,
                          console_port: int = DEFAULT_HTTP_PORT,
                          console_dir: str | None = None,
                          log_path: str | None = None,
                          seed: int | None = None,
                          time_scale: float = 1.0) -> dict:
    """Serve the mission live until success, deadline, or cancellation."""
    orch = Orchestrator(config, seed=seed)
    feeds = _script_feeds(config, orch.dt)
    relay = RelayServer(core=orch.core, host=host, port=port,
                        ws_port=ws_port, http_port=http_port)
    await relay.start()
    static = None
    if console_dir is not None and Path(console_dir).is_dir():
        static = StaticServer(Path(console_dir), host, console_port, ws_port)
        await static.start()
        log.info("console at http://%s:%d/ (relay ws :%d)", host,
                 console_port, ws_port)
    else:
        log.warning("no console bundle at %r; interactive relay only",
                    console_dir)
    writer = None
    if log_path is not None:
        writer = MissionLogWriter(log_path, config.raw,
                                  config.config_sha256(), orch.seed,
                                  config.name)

    loop = asyncio.get_running_loop()
    start = loop.time()
    total_ticks = int(round(config.deadline / orch.dt))
    success = False
    tick = 0
    try:
        for tick in range(total_ticks + 1):
            orch.begin_tick(tick)
            for feed in feeds.pop(tick, []):
                orch.publish_ui(feed)
            target = start + tick * orch.dt / time_scale
            delay = target - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            trace = orch.finish_tick()
            if writer is not None:
                writer.write_trace(trace)
            if tick % orch.period_ticks == 0 and orch.success_now():
                success = True
                break
    finally:
        result = {"success": success,
                  "reason": "success" if success else "stopped",
                  "ticks": tick, "t_end": tick * orch.dt, "seed": orch.seed}
        if writer is not None:
            writer.finish(result, orch._digest)
        await relay.stop()
        if static is not None:
            await static.stop()
    return result
