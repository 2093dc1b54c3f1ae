"""Small blocking TCP client for the relay, used by tests and tools."""

from __future__ import annotations

import json
import socket

from .. import messages
from ..messages import Envelope, FrameReader, frame_pack


class RelayClient:
    def __init__(self, client_id: str, host: str = "127.0.0.1",
                 port: int = 7601, timeout: float = 5.0):
        self.client_id = client_id
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._sock.settimeout(timeout)
        self._frames = FrameReader()
        self._pending: list[dict] = []
        self._send({"op": "hello", "client_id": client_id})
        welcome = self.recv_obj()
        if welcome.get("op") != "welcome":
            raise ConnectionError(f"bad handshake: {welcome}")

    def _send(self, obj: dict) -> None:
        self._sock.sendall(frame_pack(json.dumps(obj).encode("utf-8")))

    def subscribe(self, pattern: str) -> None:
        self._send({"op": "subscribe", "pattern": pattern})
        ack = self.recv_obj()
        if not (ack.get("op") == "ack" and ack.get("ok")):
            raise ValueError(f"subscribe rejected: {ack}")

    def publish(self, env: Envelope) -> None:
        self._send({"op": "publish", "env": messages.envelope_to_obj(env)})

    def recv_obj(self) -> dict:
        """Next protocol object, blocking up to the socket timeout."""
        while not self._pending:
            data = self._sock.recv(65536)
            if not data:
                raise ConnectionError("relay closed the connection")
            for body in self._frames.feed(data):
                self._pending.append(json.loads(body.decode("utf-8")))
        return self._pending.pop(0)

    def recv_envelope(self) -> Envelope:
        """Next delivery, skipping acks; raises on error acks."""
        while True:
            obj = self.recv_obj()
            if obj.get("op") == "deliver":
                return messages.envelope_from_obj(obj["env"])
            if obj.get("op") == "ack" and not obj.get("ok", True):
                raise ValueError(f"relay error ack: {obj}")

    def try_recv_envelope(self) -> Envelope | None:
        try:
            return self.recv_envelope()
        except (socket.timeout, ConnectionError):
            return None

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
