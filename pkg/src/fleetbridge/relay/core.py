"""Transport-independent broker core: sessions, subscriptions, routing.

The network front end (relay.server) and the headless mission runner both
drive this same core.  Routing is synchronous: publish() appends to every
matching session's outbound queue before returning, so delivery order is
a pure function of publish order.

Loss policy: sessions buffer up to `buffer_limit` envelopes.  When a
queue is full the oldest camera-channel envelope is dropped first;
non-camera envelopes are never dropped, but pushing past the limit is
recorded in `non_camera_overflow` so tests can fail on it.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field

from ..messages import Envelope, is_camera_topic, valid_pattern

log = logging.getLogger("fleetbridge.relay")

DEFAULT_BUFFER_LIMIT = 10_000

LATENCY_BUCKETS_MS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)


class RelayError(Exception):
    pass


class SpoofError(RelayError):
    """Envelope sender does not match the publishing session."""


class PatternError(RelayError):
    """Subscription pattern is malformed."""


class SessionClosed(RelayError):
    pass


@dataclass
class ClientSession:
    client_id: str
    connected_at: float
    subscriptions: list[str] = field(default_factory=list)
    queue: deque = field(default_factory=deque)
    closed: bool = False
    close_reason: str = ""
    # Network front ends set this to get told about fresh queue entries.
    on_enqueue: object = None
    # Pre-split patterns, maintained by subscribe(); hot path for routing.
    _compiled: list = field(default_factory=list)

    def matches(self, topic: str) -> bool:
        return self.matches_segments(topic[1:].split("/")) \
            if topic.startswith("/") else False

    def matches_segments(self, segments: list[str]) -> bool:
        n = len(segments)
        for pattern in self._compiled:
            if len(pattern) != n:
                continue
            if all(ps == "*" or ps == ts
                   for ps, ts in zip(pattern, segments)):
                return True
        return False

    def drain(self) -> list[Envelope]:
        """Take everything queued so far (in-process consumers)."""
        out = list(self.queue)
        self.queue.clear()
        return out


class RelayCore:
    """The broker: register, subscribe, publish, metrics."""

    def __init__(self, buffer_limit: int = DEFAULT_BUFFER_LIMIT, clock=None):
        self._lock = threading.RLock()
        self._sessions: dict[str, ClientSession] = {}
        self._buffer_limit = buffer_limit
        self._clock = clock or time.monotonic
        self._on_route = None
        self._published = 0
        self._routed = 0
        self._camera_drops = 0
        self._non_camera_overflow = 0
        self._sessions_total = 0
        self._evictions = 0
        self._latency_counts = [0] * (len(LATENCY_BUCKETS_MS) + 1)

    def set_route_hook(self, hook) -> None:
        """hook(envelope, recipient_ids) called after each publish routes."""
        self._on_route = hook

    def register(self, client_id: str) -> ClientSession:
        """Create a live session; a duplicate id evicts the old session."""
        if not client_id:
            raise RelayError("client_id must be non-empty")
        with self._lock:
            old = self._sessions.get(client_id)
            if old is not None:
                old.closed = True
                old.close_reason = "evicted: client_id reconnected"
                self._evictions += 1
                if old.on_enqueue is not None:
                    old.on_enqueue(old)
            session = ClientSession(client_id=client_id,
                                    connected_at=self._clock())
            self._sessions[client_id] = session
            self._sessions_total += 1
            return session

    def unregister(self, session: ClientSession) -> None:
        with self._lock:
            if self._sessions.get(session.client_id) is session:
                del self._sessions[session.client_id]
            session.closed = True
            session.close_reason = session.close_reason or "unregistered"

    def subscribe(self, session: ClientSession, pattern: str) -> None:
        if session.closed:
            raise SessionClosed(session.close_reason)
        if not valid_pattern(pattern):
            raise PatternError(f"malformed pattern {pattern!r}")
        with self._lock:
            if pattern not in session.subscriptions:
                session.subscriptions.append(pattern)
                session._compiled.append(pattern[1:].split("/"))

    def publish(self, session: ClientSession, env: Envelope) -> int:
        """Route to every subscribed session except the sender; returns fan-out."""
        if session.closed:
            raise SessionClosed(session.close_reason)
        if env.sender != session.client_id:
            raise SpoofError(
                f"session {session.client_id!r} cannot send as {env.sender!r}")
        env.validate()
        start = time.perf_counter()
        recipients = []
        segments = env.topic[1:].split("/")
        with self._lock:
            self._published += 1
            for other in self._sessions.values():
                if other.client_id == env.sender or other.closed:
                    continue
                if not other.matches_segments(segments):
                    continue
                self._enqueue(other, env)
                recipients.append(other.client_id)
            self._routed += len(recipients)
            elapsed_ms = (time.perf_counter() - start) * 1e3
            self._observe_latency(elapsed_ms, len(recipients))
        if log.isEnabledFor(logging.DEBUG):
            log.debug("%s", json.dumps(
                {"topic": env.topic, "sender": env.sender, "seq": env.seq,
                 "stamp": env.stamp, "kind": env.kind,
                 "recipients": recipients, "route_ms": round(elapsed_ms, 3)},
                sort_keys=True))
        if self._on_route is not None:
            self._on_route(env, recipients)
        return len(recipients)

    def _enqueue(self, session: ClientSession, env: Envelope) -> None:
        if len(session.queue) >= self._buffer_limit:
            if not self._drop_oldest_camera(session):
                if is_camera_topic(env.topic):
                    self._camera_drops += 1
                    return
                self._non_camera_overflow += 1
        session.queue.append(env)
        if session.on_enqueue is not None:
            session.on_enqueue(session)

    def _drop_oldest_camera(self, session: ClientSession) -> bool:
        for i, queued in enumerate(session.queue):
            if is_camera_topic(queued.topic):
                del session.queue[i]
                self._camera_drops += 1
                return True
        return False

    def _observe_latency(self, elapsed_ms: float, n: int) -> None:
        if n <= 0:
            return
        for i, edge in enumerate(LATENCY_BUCKETS_MS):
            if elapsed_ms <= edge:
                self._latency_counts[i] += n
                return
        self._latency_counts[-1] += n

    def session(self, client_id: str) -> ClientSession | None:
        with self._lock:
            return self._sessions.get(client_id)

    def session_count(self) -> int:
        with self._lock:
            return sum(1 for s in self._sessions.values() if not s.closed)

    def metrics(self) -> dict:
        """Counter snapshot plus the delivery-latency histogram."""
        with self._lock:
            buckets = {}
            for i, edge in enumerate(LATENCY_BUCKETS_MS):
                buckets[f"le_{edge}ms"] = self._latency_counts[i]
            buckets["gt_50.0ms"] = self._latency_counts[-1]
            return {
                "sessions_live": self.session_count(),
                "sessions_total": self._sessions_total,
                "evictions": self._evictions,
                "published": self._published,
                "routed": self._routed,
                "camera_drops": self._camera_drops,
                "non_camera_overflow": self._non_camera_overflow,
                "delivery_latency_ms": buckets,
            }
