from __future__ import annotations

import math
import random

import pytest

from fleetbridge.messages import (
    AgentStatus,
    AnchorRecord,
    Envelope,
    FramedPose,
    UiEvent,
)
from fleetbridge.opscore import OperatorEngine
from fleetbridge.relay import RelayCore
from fleetbridge.simworld import (
    Box,
    RouteKey,
    SensorSpec,
    Simulator,
    UgvState,
    WalkerState,
    WorldModel,
    WorldObject,
)

DT = 0.05
PERIOD = 2  # 10 Hz boundaries at dt=0.05


class Rig:
    """Relay + simulator + operator engines stepped on one sim clock."""

    def __init__(self, operators=("carol",), ugvs=None, walkers=None,
                 objects=(), obstacles=(), extent=(200.0, 200.0),
                 anchors=None):
        self.core = RelayCore()
        self.world = WorldModel(extent=extent, obstacles=list(obstacles),
                                objects=list(objects), seed=2, dt=DT)
        if anchors is None:
            anchors = [AnchorRecord(
                id="asa_0", created_by="jackal",
                pose_in_world=FramedPose("world", 0.0, 0.0, 0.0))]
        if ugvs is None:
            ugvs = [UgvState(name="jackal",
                             pose=FramedPose("world", 10.0, 0.0, 0.0))]
        if walkers is None:
            walkers = [WalkerState(name=op,
                                   pose=FramedPose("world", 0.0, 0.0, 0.0))
                       for op in operators]
        self.sim = Simulator(self.core, self.world, anchors, ugvs, walkers)
        self.engines = {op: OperatorEngine(op, self.core)
                        for op in operators}
        self.ugvs = {u.name: u for u in ugvs}
        self.tick = 0
        self.events: dict[int, list[tuple[str, UiEvent]]] = {}

    def at(self, t: float, operator: str, event: str, agent: str = "",
           **data) -> None:
        tick = round(t / DT)
        self.events.setdefault(tick, []).append(
            (operator, UiEvent(event=event, agent=agent, data=data)))

    def run_until(self, t_end: float, probe=None) -> None:
        while self.tick * DT < t_end:
            t = self.tick * DT
            for engine in self.engines.values():
                engine.ingest_inbox(t)
            for operator, event in self.events.pop(self.tick, []):
                self.engines[operator].handle_ui(event, t)
            if self.tick % PERIOD == 0:
                for engine in self.engines.values():
                    engine.emit_frame(t)
            self.sim.on_tick(self.tick, t)
            if probe is not None:
                probe(self.tick, t)
            self.tick += 1


def test_teleop_handshake_and_red_labels():
    rig = Rig(operators=("carol", "dave"))
    rig.at(0.5, "carol", "begin_teleop", "jackal")
    rig.run_until(1.5)
    carol = rig.engines["carol"]
    dave = rig.engines["dave"]
    assert carol.teleop_engaged and carol.teleop_agent == "jackal"
    assert rig.ugvs["jackal"].mode == "teleoperation"
    assert rig.ugvs["jackal"].owner == "carol"
    # every observer's label turns red and shows the commander
    for engine in (carol, dave):
        view = engine.view_model_data(1.5)
        entry = next(a for a in view["agents"] if a["name"] == "jackal")
        assert entry["label"]["color"] == "controlled_red"
        assert entry["owner"] == "carol"
        assert entry["mode"] == "teleoperation"


def test_second_operator_rejected_while_owned():
    rig = Rig(operators=("carol", "dave"))
    rig.at(0.5, "carol", "begin_teleop", "jackal")
    rig.at(1.5, "dave", "begin_teleop", "jackal")
    rig.run_until(2.5)
    dave = rig.engines["dave"]
    assert not dave.teleop_engaged
    assert any(c["event"] == "teleop_rejected" for c in dave.confirmations)
    assert rig.ugvs["jackal"].owner == "carol"


def test_joystick_drives_robot_and_watchdog_zeroes():
    rig = Rig()
    rig.at(0.5, "carol", "begin_teleop", "jackal")
    rig.at(1.0, "carol", "joystick", "jackal", dx=0.15, dy=0.0, dyaw=0.0)
    rig.run_until(3.0)
    jackal = rig.ugvs["jackal"]
    assert jackal.v == 1.0
    moved_x = jackal.pose.x
    assert moved_x > 10.5
    # release -> zero command within one UI frame
    rig.at(3.0, "carol", "joystick_release", "jackal")
    rig.run_until(3.3)
    assert jackal.v == 0.0
    # silence afterwards (engine keeps publishing nothing): watchdog idles
    rig.run_until(8.6)
    assert jackal.mode == "idle"
    carol = rig.engines["carol"]
    assert not carol.teleop_engaged
    assert any(c["event"] == "teleop_lost" for c in carol.confirmations)


def test_waypoint_flow_sends_path_in_anchor_frame():
    anchors = [
        AnchorRecord(id="asa_0", created_by="jackal",
                     pose_in_world=FramedPose("world", 0.0, 0.0, 0.0)),
        AnchorRecord(id="asa_1", created_by="jackal",
                     pose_in_world=FramedPose("world", 60.0, 0.0, 0.5)),
    ]
    ugvs = [UgvState(name="husky", pose=FramedPose("world", 55.0, 0.0, 0.0))]
    walkers = [WalkerState(name="carol", pose=FramedPose("world", 0.0, 0.0, 0.0))]
    rig = Rig(operators=("carol",), ugvs=ugvs, walkers=walkers,
              anchors=anchors)
    rig.at(0.5, "carol", "waypoint_open", "husky")
    rig.at(0.7, "carol", "waypoint_adjust", "husky", steps=3)  # 20 m
    rig.at(0.9, "carol", "waypoint_add", "husky")
    rig.at(1.1, "carol", "waypoint_send", "husky")
    captured = []
    rig.core.set_route_hook(
        lambda e, r: captured.append(e) if e.kind == "nav_path"
        and e.topic == "/husky/nav_path" else None)
    rig.run_until(2.0)
    assert len(captured) == 1
    path = captured[0].payload
    # husky sits nearest asa_1, so the path must arrive in asa_1 coordinates
    assert path.frame == "asa_1"
    # authored marker: 20 m ahead of carol at origin -> world (20, 0)
    sim = rig.sim
    world_pose = sim.anchor_to_world("asa_1", path.poses[0])
    assert math.hypot(world_pose.x - 20.0, world_pose.y - 0.0) < 1e-9
    carol = rig.engines["carol"]
    assert any(c["event"] == "path_sent" for c in carol.confirmations)
    assert carol.draft is None
    rig.run_until(40.0)
    husky = rig.ugvs["husky"]
    assert math.hypot(husky.pose.x - 20.0, husky.pose.y) <= 0.5
    assert husky.mode == "idle"


def test_follow_me_goal_geometry_and_trailing():
    walkers = [WalkerState(
        name="carol", pose=FramedPose("world", 50.0, 50.0, 0.0),
        route=[RouteKey(0.0, 50.0, 50.0), RouteKey(5.0, 50.0, 50.0),
               RouteKey(45.0, 90.0, 50.0)])]  # 1 m/s walk east
    ugvs = [UgvState(name="jackal", pose=FramedPose("world", 48.5, 50.0, 0.0))]
    rig = Rig(operators=("carol",), ugvs=ugvs, walkers=walkers)
    rig.at(0.5, "carol", "follow_me", "jackal")
    goals = []
    rig.core.set_route_hook(
        lambda e, r: goals.append(e) if e.topic == "/jackal/goal_pose" else None)

    trail = []

    def probe(tick, t):
        if t > 10.0 and tick % PERIOD == 0:
            user = rig.sim.agent_world_pose("carol")
            jackal = rig.ugvs["jackal"].pose
            trail.append(math.hypot(user.x - jackal.x, user.y - jackal.y))

    rig.run_until(44.0, probe=probe)
    assert rig.ugvs["jackal"].mode == "follow"
    # goals arrive at 10 Hz once confirmed
    assert len(goals) > 300
    # goal geometry: 1 m directly behind the instantaneous user pose
    g = goals[-1].payload
    world_goal = rig.sim.anchor_to_world(g.frame, g)
    user = rig.sim.agent_world_pose("carol")
    expected = (user.x - math.cos(user.yaw), user.y - math.sin(user.yaw))
    assert math.hypot(world_goal.x - expected[0],
                      world_goal.y - expected[1]) < 0.15
    # trailing error after convergence stays within 2.5 m
    assert trail and max(trail) <= 2.5
    # stop reverts the agent to idle and ends the goal stream
    rig.at(44.0, "carol", "stop", "jackal")
    rig.run_until(45.0)
    n_goals = len(goals)
    rig.run_until(46.0)
    assert len(goals) == n_goals
    assert rig.ugvs["jackal"].mode == "idle"


def test_follow_me_yaw_rule():
    # user facing +y: goal is 1 m south of the user, yaw +pi/2
    walkers = [WalkerState(name="carol",
                           pose=FramedPose("world", 0.0, 0.0, math.pi / 2))]
    rig = Rig(operators=("carol",), walkers=walkers)
    rig.at(0.5, "carol", "follow_me", "jackal")
    goals = []
    rig.core.set_route_hook(
        lambda e, r: goals.append(e) if e.topic == "/jackal/goal_pose" else None)
    rig.run_until(2.0)
    g = goals[-1].payload
    world_goal = rig.sim.anchor_to_world(g.frame, g)
    assert world_goal.x == pytest.approx(0.0, abs=1e-9)
    assert world_goal.y == pytest.approx(-1.0, abs=1e-9)
    assert world_goal.yaw == pytest.approx(math.pi / 2)


def test_status_ingest_ignores_stale_seq():
    core = RelayCore()
    engine = OperatorEngine("carol", core)
    feeder = core.register("feeder")

    def status_env(seq, battery):
        return Envelope(
            topic="/jackal/status", sender="feeder", seq=seq, stamp=float(seq),
            kind="agent_status",
            payload=AgentStatus(name="jackal", kind="UGV", battery_pct=battery,
                                mode="idle"))

    for seq, battery in ((6, 70.0), (7, 77.0)):
        core.publish(feeder, status_env(seq, battery))
    engine.ingest_inbox(1.0)
    assert engine.ledger.statuses["jackal"].battery_pct == 77.0
    # a late out-of-order seq 5 is dropped
    engine.ingest(status_env(5, 10.0), 2.0)
    assert engine.ledger.statuses["jackal"].battery_pct == 77.0


def test_ownership_contention_fuzz():
    """Randomized 3-operator contention: ownership stays exclusive and
    non-owner twists are never applied."""
    rig = Rig(operators=("carol", "dave", "erin"))
    rng = random.Random(42)
    jackal = rig.ugvs["jackal"]
    applied = []
    original_apply = None

    import fleetbridge.simworld as sw
    original_apply = sw.apply_twist

    def spy_apply(state, cmd, t):
        warn = original_apply(state, cmd, t)
        if warn is None:
            applied.append((cmd.issuer, state.owner))
        return warn

    sw.apply_twist = spy_apply
    try:
        ops = list(rig.engines)
        t_next = 0.5
        for _ in range(600):
            op = rng.choice(ops)
            action = rng.choice(["begin_teleop", "end_teleop", "joystick",
                                 "follow_me", "stop", "joystick_release"])
            data = {}
            if action == "joystick":
                data = {"dx": rng.uniform(-0.15, 0.15), "dy": 0.0,
                        "dyaw": rng.uniform(-1.5, 1.5)}
            rig.at(t_next, op, action, "jackal", **data)
            t_next += rng.choice([0.05, 0.1, 0.2])

        def probe(tick, t):
            if jackal.mode in ("teleoperation", "follow"):
                assert jackal.owner != ""
            # Exclusivity: never two engines engaged on the same agent.
            # (An engine's belief may trail the sim by one status period
            # right after a release, so sim-side owner is checked via the
            # applied-twist spy instead of instantaneously here.)
            engaged = [op for op, e in rig.engines.items()
                       if e.teleop_engaged and e.teleop_agent == "jackal"]
            assert len(engaged) <= 1

        rig.run_until(t_next + 2.0, probe=probe)
        # Eventual consistency once the dust settles.
        for op, eng in rig.engines.items():
            if eng.teleop_engaged and eng.teleop_agent == "jackal":
                assert jackal.owner == op and jackal.mode == "teleoperation"
    finally:
        sw.apply_twist = original_apply
    # every applied twist came from the owner of record at application time
    assert applied, "fuzz never applied a twist"
    for issuer, owner in applied:
        assert issuer == owner


def test_detection_reaches_all_engines():
    rig = Rig(operators=("carol", "dave", "erin"),
              objects=[WorldObject("blue_barrel", 25.0, 0.0, 0.4)],
              ugvs=[UgvState(name="jackal",
                             pose=FramedPose("world", 10.0, 0.0, 0.0),
                             sensor=SensorSpec(half_angle=math.radians(30),
                                               range_m=20.0))])
    rig.run_until(1.0)
    for engine in rig.engines.values():
        assert len(engine.detections) == 1
        d = engine.detections[0]
        assert d["label"] == "blue_barrel"
        assert math.hypot(d["x"] - 25.0, d["y"]) < 1e-9
        assert any(c["event"] == "detection_banner"
                   for c in engine.confirmations)


def test_view_model_contents():
    rig = Rig(operators=("carol",))
    rig.at(0.5, "carol", "open_label", "jackal")
    rig.run_until(1.0)
    engine = rig.engines["carol"]
    view = engine.view_model_data(1.0)
    assert view["root"] == "asa_0"
    assert view["user"] is not None
    entry = next(a for a in view["agents"] if a["name"] == "jackal")
    assert entry["label"]["expanded"] is True
    assert entry["distance"] == pytest.approx(10.0, abs=0.01)
    assert entry["battery_pct"] <= 100.0
    assert entry["camera"] is not None
    assert view["anchors"][0]["id"] == "asa_0"
