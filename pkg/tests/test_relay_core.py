from __future__ import annotations

import random

import pytest

from fleetbridge.messages import Envelope, FramedPose, UiEvent
from fleetbridge.relay import PatternError, RelayCore, SpoofError


def env(sender, topic, seq, kind="ui_event", stamp=None):
    return Envelope(topic=topic, sender=sender, seq=seq,
                    stamp=float(seq) if stamp is None else stamp,
                    kind=kind, payload=UiEvent(event="tick"))


def camera_env(sender, seq, cam=0):
    return Envelope(topic=f"/{sender}/camera/{cam}", sender=sender, seq=seq,
                    stamp=float(seq), kind="ui_event",
                    payload=UiEvent(event="frame"))


class TestRegister:
    def test_first_connection(self):
        core = RelayCore()
        core.register("jackal")
        assert core.session_count() == 1

    def test_duplicate_id_evicts_old(self):
        core = RelayCore()
        first = core.register("jackal")
        second = core.register("jackal")
        assert core.session_count() == 1
        assert first.closed and "evicted" in first.close_reason
        assert not second.closed
        assert core.metrics()["evictions"] == 1

    def test_soak_60_distinct_clients(self):
        core = RelayCore()
        for i in range(60):
            core.register(f"agent_{i:02d}")
        assert core.session_count() == 60


class TestSubscribe:
    def test_wildcard_matches_one_segment(self):
        core = RelayCore()
        pub = core.register("husky")
        sub = core.register("viewer")
        core.subscribe(sub, "/*/tf")
        core.publish(pub, env("husky", "/husky/tf", 1))
        assert len(sub.queue) == 1
        # Three-segment topic does not match a two-segment pattern.
        core.publish(pub, env("husky", "/husky/camera/0", 1))
        assert len(sub.queue) == 1

    def test_exact_camera_index(self):
        core = RelayCore()
        pub = core.register("husky")
        sub = core.register("viewer")
        core.subscribe(sub, "/husky/camera/0")
        core.publish(pub, camera_env("husky", 1, cam=1))
        assert len(sub.queue) == 0
        core.publish(pub, camera_env("husky", 2, cam=0))
        assert len(sub.queue) == 1

    def test_overlapping_patterns_deliver_once(self):
        core = RelayCore()
        pub = core.register("husky")
        sub = core.register("viewer")
        core.subscribe(sub, "/husky/*")
        core.subscribe(sub, "/*/tf")
        fanout = core.publish(pub, env("husky", "/husky/tf", 1))
        assert fanout == 1
        assert len(sub.queue) == 1

    def test_malformed_pattern(self):
        core = RelayCore()
        session = core.register("viewer")
        for bad in ("tf", "/", "/onlyone", "//tf"):
            with pytest.raises(PatternError):
                core.subscribe(session, bad)


class TestPublish:
    def test_fifo_order(self):
        core = RelayCore()
        pub = core.register("a")
        sub = core.register("b")
        core.subscribe(sub, "/a/tf")
        for seq in (1, 2, 3):
            core.publish(pub, env("a", "/a/tf", seq))
        assert [e.seq for e in sub.drain()] == [1, 2, 3]

    def test_sender_spoof_rejected(self):
        core = RelayCore()
        session = core.register("a")
        with pytest.raises(SpoofError):
            core.publish(session, env("b", "/b/tf", 1))

    def test_fan_out_without_echo(self):
        core = RelayCore()
        pub = core.register("a")
        subs = [core.register(f"s{i}") for i in range(3)]
        for s in subs + [pub]:
            core.subscribe(s, "/a/tf")
        fanout = core.publish(pub, env("a", "/a/tf", 1))
        assert fanout == 3
        assert all(len(s.queue) == 1 for s in subs)
        assert len(pub.queue) == 0


class TestMetrics:
    def test_fresh_relay_all_zero(self):
        m = RelayCore().metrics()
        assert m["sessions_live"] == 0
        assert m["published"] == 0
        assert m["routed"] == 0
        assert m["camera_drops"] == 0
        assert m["non_camera_overflow"] == 0

    def test_one_publish_one_subscriber(self):
        core = RelayCore()
        pub = core.register("a")
        sub = core.register("b")
        core.subscribe(sub, "/a/tf")
        core.publish(pub, env("a", "/a/tf", 1))
        m = core.metrics()
        assert m["routed"] == 1
        assert m["published"] == 1

    def test_camera_flood_drops_only_cameras(self):
        core = RelayCore(buffer_limit=50)
        pub = core.register("husky")
        sub = core.register("viewer")
        core.subscribe(sub, "/husky/camera/0")
        core.subscribe(sub, "/husky/tf")
        interleaved = 0
        for seq in range(1, 101):
            core.publish(pub, camera_env("husky", seq))
            if seq % 10 == 0:
                interleaved += 1
                core.publish(pub, env("husky", "/husky/tf", interleaved))
        m = core.metrics()
        assert m["camera_drops"] > 0
        assert m["non_camera_overflow"] == 0
        queued = sub.drain()
        tf = [e for e in queued if e.topic == "/husky/tf"]
        cams = [e for e in queued if e.topic.startswith("/husky/camera")]
        assert [e.seq for e in tf] == list(range(1, interleaved + 1))
        # Freshest camera frames survive, still in order.
        seqs = [e.seq for e in cams]
        assert seqs == sorted(seqs)
        assert seqs[-1] == 100
        assert len(queued) <= 50

    def test_non_camera_overflow_is_recorded_not_dropped(self):
        core = RelayCore(buffer_limit=10)
        pub = core.register("a")
        sub = core.register("b")
        core.subscribe(sub, "/a/tf")
        for seq in range(1, 15):
            core.publish(pub, env("a", "/a/tf", seq))
        assert core.metrics()["non_camera_overflow"] == 4
        assert [e.seq for e in sub.drain()] == list(range(1, 15))


def test_route_hook_sees_recipients():
    core = RelayCore()
    seen = []
    core.set_route_hook(lambda e, rec: seen.append((e.topic, tuple(rec))))
    pub = core.register("a")
    sub = core.register("b")
    core.subscribe(sub, "/a/tf")
    core.publish(pub, env("a", "/a/tf", 1))
    assert seen == [("/a/tf", ("b",))]


def test_randomized_fifo_interleaving():
    """Per-(sender, topic) FIFO survives arbitrary cross-client interleaving."""
    rng = random.Random(7)
    core = RelayCore()
    publishers = {name: core.register(name) for name in ("p0", "p1", "p2", "p3")}
    subscribers = {name: core.register(name) for name in ("s0", "s1", "s2")}
    core.subscribe(subscribers["s0"], "/*/tf")
    core.subscribe(subscribers["s1"], "/p0/*")
    core.subscribe(subscribers["s1"], "/*/tf")
    core.subscribe(subscribers["s2"], "/p1/status")
    seqs = {(p, ch): 0 for p in publishers for ch in ("tf", "status")}
    for _ in range(5000):
        p = rng.choice(list(publishers))
        ch = rng.choice(("tf", "status"))
        seqs[(p, ch)] += 1
        core.publish(publishers[p],
                     env(p, f"/{p}/{ch}", seqs[(p, ch)]))
    for sub in subscribers.values():
        last = {}
        for e in sub.drain():
            key = (e.sender, e.topic)
            assert e.seq > last.get(key, 0)
            assert e.sender != sub.client_id
            last[key] = e.seq
    assert core.metrics()["non_camera_overflow"] == 0
