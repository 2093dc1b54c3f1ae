"""Network front end for the relay core.

Three listeners share one RelayCore:

  - TCP (default 7601): length-prefixed JSON frames, one op per frame.
  - WebSocket (default 7602): the same JSON ops, one per text message,
    for browser clients.
  - HTTP (default 7603): GET /metrics returns the core metrics snapshot.

Client ops:
  {"op": "hello", "client_id": ID}          -> {"op": "welcome", ...}
  {"op": "subscribe", "pattern": P}         -> {"op": "ack", "ok": true|false}
  {"op": "publish", "env": {...}}           -> error ack only on failure
Server pushes:
  {"op": "deliver", "env": {...}}
  {"op": "event", "event": "evicted"}       before closing a replaced session
"""

from __future__ import annotations

import asyncio
import json
import logging

from websockets.asyncio.server import serve as ws_serve

from .. import messages
from ..messages import FrameReader, MessageError, frame_pack
from .core import RelayCore, RelayError

log = logging.getLogger("fleetbridge.relay")

HANDSHAKE_TIMEOUT_S = 5.0


class _Connection:
    """One client on either transport; owns the session pump."""

    def __init__(self, server: "RelayServer", send_text, close):
        self.server = server
        self.core = server.core
        self._send_text = send_text
        self._close = close
        self.session = None
        self._pump_task = None
        self._wakeup = asyncio.Event()

    async def send_obj(self, obj: dict) -> None:
        await self._send_text(json.dumps(obj, separators=(",", ":")))

    async def handle_text(self, text: str) -> None:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            await self.send_obj({"op": "ack", "ok": False,
                                 "error": f"bad JSON: {exc}"})
            return
        op = obj.get("op")
        if op == "hello":
            await self._handle_hello(obj)
        elif self.session is None:
            await self.send_obj({"op": "ack", "ok": False,
                                 "error": "hello required first"})
        elif op == "subscribe":
            await self._handle_subscribe(obj)
        elif op == "publish":
            await self._handle_publish(obj)
        else:
            await self.send_obj({"op": "ack", "ok": False,
                                 "error": f"unknown op {op!r}"})

    async def _handle_hello(self, obj: dict) -> None:
        client_id = obj.get("client_id")
        if not isinstance(client_id, str) or not client_id:
            await self.send_obj({"op": "ack", "ok": False,
                                 "error": "client_id required"})
            return
        loop = asyncio.get_running_loop()
        self.session = self.core.register(client_id)
        self.session.on_enqueue = lambda _s: loop.call_soon_threadsafe(
            self._wakeup.set)
        self._pump_task = asyncio.ensure_future(self._pump())
        await self.send_obj({"op": "welcome", "client_id": client_id})

    async def _handle_subscribe(self, obj: dict) -> None:
        pattern = obj.get("pattern", "")
        try:
            self.core.subscribe(self.session, pattern)
        except RelayError as exc:
            await self.send_obj({"op": "ack", "ok": False, "about": "subscribe",
                                 "error": str(exc)})
            return
        await self.send_obj({"op": "ack", "ok": True, "about": "subscribe",
                             "pattern": pattern})

    async def _handle_publish(self, obj: dict) -> None:
        try:
            env = messages.envelope_from_obj(obj.get("env"))
            self.core.publish(self.session, env)
        except (MessageError, RelayError) as exc:
            await self.send_obj({"op": "ack", "ok": False, "about": "publish",
                                 "error": str(exc)})

    async def _pump(self) -> None:
        """Flush the session queue to the socket whenever it fills."""
        try:
            while True:
                await self._wakeup.wait()
                self._wakeup.clear()
                for env in self.session.drain():
                    await self.send_obj(
                        {"op": "deliver", "env": messages.envelope_to_obj(env)})
                if self.session.closed:
                    await self.send_obj({"op": "event", "event": "evicted",
                                         "reason": self.session.close_reason})
                    await self._close()
                    return
        except asyncio.CancelledError:
            raise
        except Exception:
            log.exception("pump failed for %s", self.session.client_id)
            await self._close()

    def teardown(self) -> None:
        if self._pump_task is not None:
            self._pump_task.cancel()
        if self.session is not None and not self.session.closed:
            self.core.unregister(self.session)


class RelayServer:
    """Runs the TCP, WebSocket, and metrics listeners over one core."""

    def __init__(self, core: RelayCore | None = None, host: str = "127.0.0.1",
                 port: int = 7601, ws_port: int = 7602, http_port: int = 7603,
                 handshake_timeout: float = HANDSHAKE_TIMEOUT_S):
        self.core = core or RelayCore()
        self.host = host
        self.port = port
        self.ws_port = ws_port
        self.http_port = http_port
        self.handshake_timeout = handshake_timeout
        self._servers = []

    async def start(self) -> None:
        tcp = await asyncio.start_server(self._tcp_client, self.host, self.port)
        ws = await ws_serve(self._ws_client, self.host, self.ws_port)
        http = await asyncio.start_server(self._http_client, self.host,
                                          self.http_port)
        self._servers = [tcp, ws, http]
        log.info("relay listening: tcp=%d ws=%d http=%d", self.port,
                 self.ws_port, self.http_port)

    async def stop(self) -> None:
        for srv in self._servers:
            srv.close()
        for srv in self._servers:
            try:
                await srv.wait_closed()
            except AttributeError:
                pass
        self._servers = []

    async def serve_forever(self) -> None:
        await self.start()
        try:
            await asyncio.Event().wait()
        finally:
            await self.stop()

    async def _tcp_client(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        write_lock = asyncio.Lock()

        async def send_text(text: str) -> None:
            async with write_lock:
                writer.write(frame_pack(text.encode("utf-8")))
                await writer.drain()

        async def close() -> None:
            writer.close()

        conn = _Connection(self, send_text, close)
        frames = FrameReader()
        try:
            while True:
                timeout = self.handshake_timeout if conn.session is None else None
                try:
                    data = await asyncio.wait_for(reader.read(65536), timeout)
                except asyncio.TimeoutError:
                    log.warning("handshake timeout, closing connection")
                    return
                if not data:
                    return
                for body in frames.feed(data):
                    await conn.handle_text(body.decode("utf-8"))
        except (ConnectionResetError, MessageError, UnicodeDecodeError):
            pass
        finally:
            conn.teardown()
            writer.close()

    async def _ws_client(self, websocket) -> None:
        async def send_text(text: str) -> None:
            await websocket.send(text)

        async def close() -> None:
            await websocket.close()

        conn = _Connection(self, send_text, close)
        try:
            while True:
                timeout = self.handshake_timeout if conn.session is None else None
                try:
                    text = await asyncio.wait_for(websocket.recv(), timeout)
                except asyncio.TimeoutError:
                    return
                if isinstance(text, bytes):
                    text = text.decode("utf-8")
                await conn.handle_text(text)
        except Exception:
            pass
        finally:
            conn.teardown()

    async def _http_client(self, reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> None:
        try:
            request = await asyncio.wait_for(reader.readline(), 5.0)
            while True:
                line = await asyncio.wait_for(reader.readline(), 5.0)
                if line in (b"\r\n", b"\n", b""):
                    break
            parts = request.decode("latin-1").split()
            path = parts[1] if len(parts) >= 2 else "/"
            if path == "/metrics":
                body = json.dumps(self.core.metrics(), indent=2).encode()
                status = "200 OK"
                ctype = "application/json"
            else:
                body = b"fleetbridge relay: see /metrics\n"
                status = "404 Not Found" if path != "/" else "200 OK"
                ctype = "text/plain"
            writer.write(b"HTTP/1.1 " + status.encode() + b"\r\n"
                         b"Content-Type: " + ctype.encode() + b"\r\n"
                         b"Content-Length: " + str(len(body)).encode() + b"\r\n"
                         b"Connection: close\r\n\r\n" + body)
            await writer.drain()
        except (asyncio.TimeoutError, ConnectionResetError, IndexError):
            pass
        finally:
            writer.close()
