"""Headless mission orchestration and deterministic replay.

Every tick runs fixed phases: (1) publish due operator UI events,
(2) operator engines ingest their inboxes, (3) engines emit UI-frame
outputs at 10 Hz, (4) the simulator steps and publishes telemetry.  All
cross-component exchange rides the in-process relay core and is
tick-quantized, so a run is a pure function of (config, seed, UI-event
stream) and replay can compare the regenerated envelope stream against
the log byte for byte.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field

from ..messages import Envelope, UiEvent, canonical_json
from ..opscore import OperatorEngine
from ..relay.core import RelayCore
from ..simworld import Simulator
from .config import ScenarioConfig
from .metrics import compute_metrics
from .mission_log import (
    MissionLog,
    MissionLogWriter,
    TickTrace,
    chain_digest,
    envelope_record,
    record_env_sha,
)

GENESIS_DIGEST = "0" * 64


@dataclass
class RunResult:
    success: bool
    reason: str
    ticks: int
    t_end: float
    final_digest: str
    metrics: dict
    log_path: str | None
    wall_seconds: float
    log: MissionLog = field(repr=False, default=None)


@dataclass
class ReplayReport:
    ok: bool
    ticks_checked: int
    first_divergence: dict | None
    metrics: dict


@dataclass
class _UiFeed:
    """One UI event to publish: (tick, operator, sender, seq, stamp, event)."""

    tick: int
    operator: str
    sender: str
    seq: int
    stamp: float
    event: UiEvent


class Orchestrator:
    """Relay + sim + engines stepped on one clock, with full tracing."""

    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        self.config = config
        world = copy.deepcopy(config.world)
        if seed is not None:
            world.seed = seed
        self.seed = world.seed
        self.dt = world.dt
        self.period_ticks = max(1, round(0.1 / world.dt))
        self.t = 0.0
        self.tick = 0
        self.core = RelayCore(clock=lambda: self.t)
        self.sim = Simulator(self.core, world,
                             copy.deepcopy(config.anchors),
                             copy.deepcopy(config.ugvs),
                             copy.deepcopy(config.walkers))
        self.engines: dict[str, OperatorEngine] = {}
        for spec in config.operators:
            self.engines[spec.name] = OperatorEngine(
                spec.name, self.core, limits=spec.limits,
                gps_fixes=config.gps_fixes)
        self._operator_names = set(self.engines)
        self._ui_sessions: dict[str, object] = {}
        self._found: set[str] = set()
        self._digest = GENESIS_DIGEST
        self._trace: TickTrace | None = None
        self.core.set_route_hook(self._on_route)

    # --- tracing -------------------------------------------------------------

    def _on_route(self, env: Envelope, recipients: list[str]) -> None:
        if self._trace is None:
            return
        self._trace.envelopes.append(envelope_record(self.tick, env))
        if env.kind == "ui_event":
            operator = env.topic.split("/", 2)[1]
            self._trace.op_events.append({
                "rec": "op_event", "tick": self.tick, "t": env.stamp,
                "operator": operator, "sender": env.sender, "seq": env.seq,
                "event": {"event": env.payload.event,
                          "agent": env.payload.agent,
                          "data": env.payload.data}})
        elif env.kind == "detection":
            self._found.add(env.payload.object_label)
            self._trace.delivers.append({
                "rec": "deliver", "tick": self.tick, "topic": env.topic,
                "recipients": recipients})

    def publish_ui(self, feed: _UiFeed) -> None:
        session = self._ui_sessions.get(feed.sender)
        if session is None or session.closed:
            session = self.core.register(feed.sender)
            self._ui_sessions[feed.sender] = session
        self.core.publish(session, Envelope(
            topic=f"/{feed.operator}/ui", sender=feed.sender, seq=feed.seq,
            stamp=feed.stamp, kind="ui_event", payload=feed.event))

    # --- tick pipeline ---------------------------------------------------------

    def begin_tick(self, tick: int) -> None:
        """Open the tick's trace; envelopes published from here on (including
        network arrivals in interactive mode) are recorded under this tick."""
        self.tick = tick
        self.t = tick * self.dt
        self._trace = TickTrace(tick=tick)

    def finish_tick(self) -> TickTrace:
        """Engines ingest, UI frames fire at 10 Hz, sim steps, digest chains."""
        tick = self.tick
        for engine in self.engines.values():
            engine.ingest_inbox(self.t)
        if tick % self.period_ticks == 0:
            for engine in self.engines.values():
                engine.emit_frame(self.t)
        self.sim.on_tick(tick, self.t)
        state = self._state_bytes()
        self._digest = chain_digest(
            self._digest, state,
            [record_env_sha(r) for r in self._trace.envelopes])
        self._trace.digest = self._digest
        trace = self._trace
        self._trace = None
        return trace

    def run_tick(self, tick: int, due_events: list[_UiFeed]) -> TickTrace:
        self.begin_tick(tick)
        for feed in due_events:
            self.publish_ui(feed)
        return self.finish_tick()

    def _state_bytes(self) -> bytes:
        ugvs = []
        for u in self.sim.ugvs:
            ugvs.append({
                "name": u.name, "x": u.pose.x, "y": u.pose.y,
                "yaw": u.pose.yaw, "v": u.v, "omega": u.omega,
                "battery": u.battery_pct, "mode": u.mode, "owner": u.owner,
                "path_index": u.path_index,
                "path_len": len(u.active_path) if u.active_path else 0,
                "goal": None if u.follow_goal is None else
                [u.follow_goal.x, u.follow_goal.y, u.follow_goal.yaw]})
        walkers = [{"name": w.name, "x": w.pose.x, "y": w.pose.y,
                    "yaw": w.pose.yaw, "battery": w.battery_pct}
                   for w in self.sim.walkers]
        return canonical_json({"tick": self.tick, "ugvs": ugvs,
                               "walkers": walkers})

    def success_now(self) -> bool:
        if not self._found >= set(self.config.objects_found):
            return False
        bx, by = self.config.base
        radius = self.config.return_radius
        # Unanchored GPS-only assets are map furniture, not returning team.
        names = [u.name for u in self.sim.ugvs if u.anchored] \
            + [w.name for w in self.sim.walkers]
        for name in names:
            pose = self.sim.agent_world_pose(name)
            if (pose.x - bx) ** 2 + (pose.y - by) ** 2 > radius ** 2:
                return False
        return True


def _script_feeds(config: ScenarioConfig, dt: float) -> dict[int, list[_UiFeed]]:
    feeds: dict[int, list[_UiFeed]] = {}
    seq_counters: dict[str, int] = {}
    for spec in config.operators:
        sender = f"{spec.name}.console"
        for t, event in spec.script:
            tick = round(t / dt)
            seq = seq_counters.get(sender, 0) + 1
            seq_counters[sender] = seq
            feeds.setdefault(tick, []).append(_UiFeed(
                tick=tick, operator=spec.name, sender=sender, seq=seq,
                stamp=t, event=event))
    return feeds


def _log_feeds(log: MissionLog) -> dict[int, list[_UiFeed]]:
    feeds: dict[int, list[_UiFeed]] = {}
    for rec in log.op_events():
        feeds.setdefault(rec["tick"], []).append(_UiFeed(
            tick=rec["tick"], operator=rec["operator"], sender=rec["sender"],
            seq=rec["seq"], stamp=rec["t"],
            event=UiEvent(event=rec["event"]["event"],
                          agent=rec["event"]["agent"],
                          data=rec["event"]["data"])))
    return feeds


def run_mission(config: ScenarioConfig, log_path: str | None = None,
                seed: int | None = None) -> RunResult:
    """Run the scenario headlessly to success or deadline."""
    start_wall = time.perf_counter()
    orch = Orchestrator(config, seed=seed)
    feeds = _script_feeds(config, orch.dt)
    writer = None
    if log_path is not None:
        writer = MissionLogWriter(log_path, config.raw,
                                  config.config_sha256(), orch.seed,
                                  config.name)
    traces = []
    total_ticks = int(round(config.deadline / orch.dt))
    success = False
    tick = 0
    for tick in range(total_ticks + 1):
        trace = orch.run_tick(tick, feeds.pop(tick, []))
        traces.append(trace)
        if writer is not None:
            writer.write_trace(trace)
        if tick % orch.period_ticks == 0 and orch.success_now():
            success = True
            break
    reason = "success" if success else "deadline"
    t_end = tick * orch.dt
    result = {"success": success, "reason": reason, "ticks": tick,
              "t_end": t_end, "seed": orch.seed}
    if writer is not None:
        writer.finish(result, orch._digest)
    log = MissionLog(
        header={"rec": "header", "version": 1, "scenario": config.name,
                "seed": orch.seed, "config_sha256": config.config_sha256(),
                "config": config.raw},
        traces=traces,
        end={"rec": "end", "result": result, "final_digest": orch._digest})
    metrics = compute_metrics(log)
    return RunResult(success=success, reason=reason, ticks=tick, t_end=t_end,
                     final_digest=orch._digest, metrics=metrics,
                     log_path=log_path, wall_seconds=time.perf_counter()
                     - start_wall, log=log)


def _first_difference(expected: list[dict], got: list[dict]) -> int | None:
    for i, (a, b) in enumerate(zip(expected, got)):
        if a != b:
            return i
    if len(expected) != len(got):
        return min(len(expected), len(got))
    return None


def replay_log(log: MissionLog) -> ReplayReport:
    """Re-simulate from the recorded events and compare tick by tick."""
    from .config import parse_scenario

    config = parse_scenario(log.header["config"])
    if log.header["config_sha256"] != config.config_sha256():
        return ReplayReport(ok=False, ticks_checked=0,
                            first_divergence={"tick": -1,
                                              "what": "config hash mismatch"},
                            metrics={})
    orch = Orchestrator(config, seed=log.header["seed"])
    feeds = _log_feeds(log)
    traces = []
    for expected in log.traces:
        tick = expected.tick
        got = orch.run_tick(tick, feeds.pop(tick, []))
        traces.append(got)
        for kind, exp_list, got_list in (
                ("op_event", expected.op_events, got.op_events),
                ("envelope", expected.envelopes, got.envelopes),
                ("deliver", expected.delivers, got.delivers)):
            idx = _first_difference(exp_list, got_list)
            if idx is not None:
                return ReplayReport(
                    ok=False, ticks_checked=tick,
                    first_divergence={"tick": tick, "what": kind,
                                      "index": idx},
                    metrics={})
        if got.digest != expected.digest:
            return ReplayReport(ok=False, ticks_checked=tick,
                                first_divergence={"tick": tick,
                                                  "what": "digest"},
                                metrics={})
    replayed = MissionLog(header=log.header, traces=traces, end=log.end)
    return ReplayReport(ok=True, ticks_checked=len(log.traces),
                        first_divergence=None,
                        metrics=compute_metrics(replayed))
