"""In-process relay attachment: one session plus per-topic seq counters."""

from __future__ import annotations

from .messages import Envelope
from .relay.core import RelayCore


class CoreClient:
    def __init__(self, core: RelayCore, name: str):
        self.name = name
        self.session = core.register(name)
        self._core = core
        self._seq: dict[str, int] = {}

    def subscribe(self, pattern: str) -> None:
        self._core.subscribe(self.session, pattern)

    def publish(self, topic: str, kind: str, payload, stamp: float) -> Envelope:
        seq = self._seq.get(topic, 0) + 1
        self._seq[topic] = seq
        env = Envelope(topic=topic, sender=self.name, seq=seq, stamp=stamp,
                       kind=kind, payload=payload)
        self._core.publish(self.session, env)
        return env

    def drain(self) -> list[Envelope]:
        return self.session.drain()
