"""Deterministic fixed-step simulation of the ground team.

UGVs integrate unicycle kinematics at the physics rate (default 20 Hz)
and exchange envelopes with the relay at 10 Hz: tf + status out,
commands in.  HMD users are scripted walkers interpolated along timed
route keyframes.  Everything is a pure function of (config, seed,
command log), so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
import random
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import frames
from .messages import (
    AgentEvent,
    AgentStatus,
    AnchorRecord,
    CameraFrame,
    DetectionNotice,
    Envelope,
    FramedPose,
    ModeRequest,
    NavPath,
    TwistCommand,
    wrap_angle,
)
from .bus import CoreClient
from .relay.core import RelayCore

# Go-to-goal controller defaults; overridable per scenario.
HEADING_GAIN = 2.0
ARRIVAL_RADIUS_M = 0.5

# Teleoperation link-loss behavior.
TELEOP_ZERO_AFTER_S = 1.0
TELEOP_IDLE_AFTER_S = 5.0

STATUS_PERIOD_S = 0.1  # tf/status/goal/camera cadence

SKY_RGB = (135, 190, 235)
GROUND_RGB = (110, 96, 72)
OBJECT_COLORS = {"blue_barrel": (40, 70, 210)}


@dataclass(frozen=True)
class Box:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, x: float, y: float) -> bool:
        """Strict interior test; faces do not count as inside."""
        return self.xmin < x < self.xmax and self.ymin < y < self.ymax

    def closest_point(self, x: float, y: float) -> tuple[float, float]:
        return (min(max(x, self.xmin), self.xmax),
                min(max(y, self.ymin), self.ymax))


def segment_box_entry(p0: tuple[float, float], p1: tuple[float, float],
                      box: Box) -> float | None:
    """Earliest t in [0, 1] where the segment enters the open interior."""
    x0, y0 = p0
    dx, dy = p1[0] - x0, p1[1] - y0
    t_lo, t_hi = 0.0, 1.0
    for start, delta, lo, hi in ((x0, dx, box.xmin, box.xmax),
                                 (y0, dy, box.ymin, box.ymax)):
        if delta == 0.0:
            if not (lo < start < hi):
                return None
            continue
        ta = (lo - start) / delta
        tb = (hi - start) / delta
        if ta > tb:
            ta, tb = tb, ta
        t_lo = max(t_lo, ta)
        t_hi = min(t_hi, tb)
        if t_lo >= t_hi:
            return None
    # (t_lo, t_hi) is the open parameter window spent strictly inside.
    return t_lo


@dataclass
class WorldObject:
    label: str
    x: float
    y: float
    radius: float


@dataclass
class WorldModel:
    extent: tuple[float, float]
    obstacles: list[Box] = field(default_factory=list)
    objects: list[WorldObject] = field(default_factory=list)
    seed: int = 0
    dt: float = 0.05
    tf_noise_sigma: float = 0.0

    def validate(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        w, h = self.extent
        for i, obj in enumerate(self.objects):
            if not (0.0 <= obj.x <= w and 0.0 <= obj.y <= h):
                raise ValueError(f"objects[{i}] outside extent")


def line_of_sight(world: WorldModel, p0: tuple[float, float],
                  p1: tuple[float, float]) -> bool:
    return all(segment_box_entry(p0, p1, box) is None
               for box in world.obstacles)


def move_with_collision(world: WorldModel, x: float, y: float,
                        nx: float, ny: float) -> tuple[float, float]:
    """Advance (x, y) toward (nx, ny), stopping at the first obstacle face."""
    t_min = None
    for box in world.obstacles:
        t = segment_box_entry((x, y), (nx, ny), box)
        if t is not None and (t_min is None or t < t_min):
            t_min = t
    if t_min is None:
        return nx, ny
    cx = x + (nx - x) * t_min
    cy = y + (ny - y) * t_min
    # Float products can land a hair inside; back off along the motion.
    while any(box.contains(cx, cy) for box in world.obstacles) and t_min > 0.0:
        t_min = max(0.0, t_min - 1e-9)
        cx = x + (nx - x) * t_min
        cy = y + (ny - y) * t_min
    return cx, cy


@dataclass
class SensorSpec:
    half_angle: float = math.radians(35.0)
    range_m: float = 25.0


@dataclass
class CameraSpec:
    width: int = 64
    height: int = 48
    count: int = 1


@dataclass
class UgvState:
    name: str
    pose: FramedPose
    v: float = 0.0
    omega: float = 0.0
    v_max: float = 1.0
    omega_max: float = 1.5
    battery_pct: float = 100.0
    drain_pct_per_min: float = 0.2
    mode: str = "idle"
    owner: str = ""
    active_path: list[FramedPose] | None = None
    path_index: int = 0
    follow_goal: FramedPose | None = None
    sensor: SensorSpec = field(default_factory=SensorSpec)
    camera: CameraSpec = field(default_factory=CameraSpec)
    anchored: bool = True
    last_twist_stamp: float = -math.inf
    path_history: list[FramedPose] = field(default_factory=list)

    def at(self, x: float, y: float, yaw: float, t: float) -> None:
        self.pose = FramedPose(frame="world", x=x, y=y, yaw=yaw, stamp=t)


@dataclass
class RouteKey:
    t: float
    x: float
    y: float
    yaw: float | None = None


@dataclass
class WalkerState:
    name: str
    pose: FramedPose
    route: list[RouteKey] = field(default_factory=list)
    battery_pct: float = 100.0
    drain_pct_per_min: float = 0.1


def walker_pose_at(walker: WalkerState, t: float) -> FramedPose:
    """Piecewise-linear route interpolation; yaw follows travel direction."""
    keys = walker.route
    if not keys:
        return walker.pose
    if t <= keys[0].t:
        yaw = keys[0].yaw if keys[0].yaw is not None else walker.pose.yaw
        return FramedPose(frame="world", x=keys[0].x, y=keys[0].y, yaw=yaw,
                          stamp=t)
    yaw = keys[0].yaw if keys[0].yaw is not None else walker.pose.yaw
    for a, b in zip(keys, keys[1:]):
        moving = (a.x, a.y) != (b.x, b.y)
        if moving:
            leg_yaw = math.atan2(b.y - a.y, b.x - a.x)
        elif a.yaw is not None:
            leg_yaw = a.yaw
        else:
            leg_yaw = yaw
        if t <= b.t:
            if b.t == a.t:
                frac = 1.0
            else:
                frac = (t - a.t) / (b.t - a.t)
            return FramedPose(frame="world",
                              x=a.x + (b.x - a.x) * frac,
                              y=a.y + (b.y - a.y) * frac,
                              yaw=leg_yaw, stamp=t)
        yaw = leg_yaw
    last = keys[-1]
    if last.yaw is not None:
        yaw = last.yaw
    return FramedPose(frame="world", x=last.x, y=last.y, yaw=yaw, stamp=t)


# --- pure single-agent operations -------------------------------------------

def apply_twist(state: UgvState, cmd: TwistCommand, t: float) -> str | None:
    """Apply a teleop command; returns a warning string if it was ignored."""
    if state.mode != "teleoperation":
        return f"twist ignored: {state.name} not in teleoperation"
    if cmd.issuer != state.owner:
        return f"twist ignored: issuer {cmd.issuer!r} is not owner {state.owner!r}"
    state.v = max(-state.v_max, min(state.v_max, cmd.linear_mps))
    state.omega = max(-state.omega_max, min(state.omega_max, cmd.angular_rps))
    state.last_twist_stamp = t
    return None


def follow_controller(state: UgvState, goal: FramedPose) -> tuple[float, float]:
    """Go-to-goal unicycle law: steer at the goal, slow while turning."""
    ex = goal.x - state.pose.x
    ey = goal.y - state.pose.y
    dist = math.hypot(ex, ey)
    if dist <= ARRIVAL_RADIUS_M:
        return (0.0, 0.0)
    heading_err = wrap_angle(math.atan2(ey, ex) - state.pose.yaw)
    omega = max(-state.omega_max,
                min(state.omega_max, HEADING_GAIN * heading_err))
    v = state.v_max * max(0.0, 1.0 - abs(heading_err) / (math.pi / 2.0))
    return (v, omega)


def step_ugv(world: WorldModel, state: UgvState, t: float) -> list[str]:
    """One physics tick; returns event strings (path completion etc.)."""
    events = []
    dt = world.dt
    if state.mode == "teleoperation":
        silent = t - state.last_twist_stamp
        if silent > TELEOP_IDLE_AFTER_S:
            state.mode = "idle"
            state.owner = ""
            state.v = state.omega = 0.0
            events.append("teleop_watchdog_idle")
        elif silent > TELEOP_ZERO_AFTER_S:
            state.v = state.omega = 0.0
    if state.mode == "autonomous" and state.active_path:
        goal = state.active_path[state.path_index]
        if math.hypot(goal.x - state.pose.x,
                      goal.y - state.pose.y) <= ARRIVAL_RADIUS_M:
            if state.path_index + 1 < len(state.active_path):
                state.path_index += 1
            else:
                state.active_path = None
                state.mode = "idle"
                state.owner = ""
                state.v = state.omega = 0.0
                events.append("path_complete")
        if state.mode == "autonomous" and state.active_path:
            state.v, state.omega = follow_controller(
                state, state.active_path[state.path_index])
    elif state.mode == "follow":
        if state.follow_goal is not None:
            state.v, state.omega = follow_controller(state, state.follow_goal)
        else:
            state.v = state.omega = 0.0
    elif state.mode == "idle":
        state.v = state.omega = 0.0

    state.v = max(-state.v_max, min(state.v_max, state.v))
    state.omega = max(-state.omega_max, min(state.omega_max, state.omega))
    x, y, yaw = state.pose.x, state.pose.y, state.pose.yaw
    nx = x + state.v * math.cos(yaw) * dt
    ny = y + state.v * math.sin(yaw) * dt
    nx, ny = move_with_collision(world, x, y, nx, ny)
    w, h = world.extent
    nx = min(max(nx, 0.0), w)
    ny = min(max(ny, 0.0), h)
    state.at(nx, ny, wrap_angle(yaw + state.omega * dt), t)
    state.battery_pct = max(0.0, state.battery_pct
                            - state.drain_pct_per_min * dt / 60.0)
    return events


def visible_objects(world: WorldModel, state: UgvState) -> list[int]:
    """Indices of objects inside the sensor cone with clear line of sight."""
    out = []
    px, py, yaw = state.pose.x, state.pose.y, state.pose.yaw
    for i, obj in enumerate(world.objects):
        dist = math.hypot(obj.x - px, obj.y - py)
        if dist > state.sensor.range_m:
            continue
        bearing = wrap_angle(math.atan2(obj.y - py, obj.x - px) - yaw)
        if abs(bearing) > state.sensor.half_angle:
            continue
        if not line_of_sight(world, (px, py), (obj.x, obj.y)):
            continue
        out.append(i)
    return out


def render_camera(world: WorldModel, state: UgvState, camera_index: int,
                  t: float) -> CameraFrame:
    """Synthetic FPV raster: sky/ground split, gray walls, colored objects.

    Screen column for a clockwise-positive bearing b is
    width/2 + (b / fov) * width/2, with fov the sensor half-angle.
    """
    if not (0 <= camera_index < state.camera.count):
        raise ValueError(f"camera index {camera_index} out of range")
    w, h = state.camera.width, state.camera.height
    fov = state.sensor.half_angle
    cam_yaw = wrap_angle(state.pose.yaw + camera_index * math.pi)
    img = np.empty((h, w, 3), dtype=np.uint8)
    horizon = h // 2
    img[:horizon] = SKY_RGB
    img[horizon:] = GROUND_RGB
    px, py = state.pose.x, state.pose.y

    drawables = []
    for box in world.obstacles:
        cx, cy = box.closest_point(px, py)
        dist = math.hypot(cx - px, cy - py)
        if dist > 120.0 or dist == 0.0:
            continue
        cols = []
        for corner in ((box.xmin, box.ymin), (box.xmin, box.ymax),
                       (box.xmax, box.ymin), (box.xmax, box.ymax)):
            rel = wrap_angle(math.atan2(corner[1] - py, corner[0] - px)
                             - cam_yaw)
            if abs(rel) > math.pi / 2:
                continue
            bearing = -rel  # clockwise-positive
            cols.append(w / 2.0 + (bearing / fov) * (w / 2.0))
        if len(cols) < 2:
            continue
        drawables.append(("box", dist, min(cols), max(cols)))
    for obj in world.objects:
        dist = math.hypot(obj.x - px, obj.y - py)
        if dist == 0.0 or dist > 120.0:
            continue
        rel = wrap_angle(math.atan2(obj.y - py, obj.x - px) - cam_yaw)
        if abs(rel) > fov:
            continue
        bearing = -rel
        col = w / 2.0 + (bearing / fov) * (w / 2.0)
        drawables.append(("obj", dist, col, obj))

    for kind, dist, a, b in sorted(drawables, key=lambda d: -d[1]):
        if kind == "box":
            half = (h / 2.0) * min(1.0, 2.5 / dist)
            top = max(0, int(horizon - half))
            bot = min(h, int(horizon + half))
            c0 = max(0, int(a))
            c1 = min(w, int(b) + 1)
            if c1 > c0:
                shade = int(160.0 / (1.0 + 0.02 * dist))
                img[top:bot, c0:c1] = (shade, shade, shade)
        else:
            obj = b
            r_px = max(1.0, math.atan2(obj.radius, dist) / fov * (w / 2.0))
            color = OBJECT_COLORS.get(
                obj.label,
                ((zlib.crc32(obj.label.encode()) % 160) + 60, 90, 90))
            yy, xx = np.ogrid[:h, :w]
            mask = (xx - a) ** 2 + (yy - horizon) ** 2 <= r_px ** 2
            img[mask] = color
    return CameraFrame(agent=state.name, camera_index=camera_index,
                       width=w, height=h, pixels=img.tobytes(), stamp=t)


# --- the relay-connected simulator -------------------------------------------

class Simulator:
    """Steps every simulated agent and speaks for them on the relay."""

    def __init__(self, core: RelayCore, world: WorldModel,
                 anchors: list[AnchorRecord], ugvs: list[UgvState],
                 walkers: list[WalkerState]):
        world.validate()
        self.world = world
        self.ugvs = ugvs
        self.walkers = walkers
        self.anchors = anchors  # carry pose_in_world ground truth
        self._anchor_world = {a.id: a.pose_in_world for a in anchors}
        self._rng = random.Random(world.seed)
        self._clients: dict[str, CoreClient] = {}
        self._detected: set[tuple[str, int]] = set()
        self._anchors_published = False
        self.period_ticks = max(1, round(STATUS_PERIOD_S / world.dt))
        for ugv in ugvs:
            client = CoreClient(core, ugv.name)
            client.subscribe(f"/{ugv.name}/cmd_vel")
            client.subscribe(f"/{ugv.name}/nav_path")
            client.subscribe(f"/{ugv.name}/goal_pose")
            client.subscribe(f"/{ugv.name}/mode")
            self._clients[ugv.name] = client
        for walker in walkers:
            # The scripted body speaks as "<name>.body"; the operator's
            # engine holds the primary "<name>" identity.
            self._clients[walker.name] = CoreClient(core, walker.name + ".body")

    # frame helpers against ground truth
    def world_to_anchor(self, anchor_id: str, pose: FramedPose) -> FramedPose:
        anchor_pose = self._anchor_world[anchor_id]
        rel = frames.compose(frames.invert(anchor_pose), pose)
        return FramedPose(frame=anchor_id, x=rel.x, y=rel.y, yaw=rel.yaw,
                          stamp=pose.stamp)

    def anchor_to_world(self, anchor_id: str, pose: FramedPose) -> FramedPose:
        anchor_pose = self._anchor_world[anchor_id]
        rel = frames.compose(anchor_pose, pose)
        return FramedPose(frame="world", x=rel.x, y=rel.y, yaw=rel.yaw,
                          stamp=pose.stamp)

    def closest_anchor_id(self, pose: FramedPose) -> str:
        best, best_d = None, math.inf
        for anchor_id in sorted(self._anchor_world):
            ap = self._anchor_world[anchor_id]
            d = math.hypot(ap.x - pose.x, ap.y - pose.y)
            if d < best_d:
                best, best_d = anchor_id, d
        return best

    def agent_world_pose(self, name: str) -> FramedPose:
        for ugv in self.ugvs:
            if ugv.name == name:
                return ugv.pose
        for walker in self.walkers:
            if walker.name == name:
                return walker.pose
        raise KeyError(name)

    def on_tick(self, tick: int, t: float) -> None:
        if not self._anchors_published:
            self._publish_anchors(t)
            self._anchors_published = True
        for ugv in self.ugvs:
            self._ingest_commands(ugv, t)
        for ugv in self.ugvs:
            for event in step_ugv(self.world, ugv, t):
                if event == "path_complete":
                    self._publish_traj_past(ugv, t)
                    self._event(ugv.name, "path_complete", "", "", t)
                elif event == "teleop_watchdog_idle":
                    self._event(ugv.name, "teleop_watchdog_idle",
                                "no twist for 5 s", "", t)
        for walker in self.walkers:
            walker.pose = walker_pose_at(walker, t)
            walker.battery_pct = max(
                0.0, walker.battery_pct
                - walker.drain_pct_per_min * self.world.dt / 60.0)
        if tick % self.period_ticks == 0:
            self._publish_telemetry(t)
            self._sense(t)

    def _publish_anchors(self, t: float) -> None:
        """First available UGV announces the anchor layer at mission start."""
        placer = self.ugvs[0].name if self.ugvs else "world"
        client = self._clients.get(placer)
        if client is None:
            return
        root = self.anchors[0]
        for i, anchor in enumerate(self.anchors):
            if i == 0:
                wire = AnchorRecord(id=anchor.id, created_by=anchor.created_by,
                                    geo=anchor.geo)
            else:
                rel = frames.compose(frames.invert(root.pose_in_world),
                                     anchor.pose_in_world)
                wire = AnchorRecord(
                    id=anchor.id, created_by=anchor.created_by, geo=anchor.geo,
                    parent=root.id,
                    pose_in_parent=FramedPose(frame=root.id, x=rel.x, y=rel.y,
                                              yaw=rel.yaw, stamp=t))
            client.publish(f"/{placer}/anchor", "anchor_record", wire, t)

    def _ingest_commands(self, ugv: UgvState, t: float) -> None:
        client = self._clients[ugv.name]
        for env in client.drain():
            channel = env.topic.split("/", 2)[2]
            if channel == "cmd_vel":
                warning = apply_twist(ugv, env.payload, t)
                if warning:
                    self._event(ugv.name, "command_ignored", warning,
                                env.payload.issuer, t)
            elif channel == "mode":
                self._handle_mode_request(ugv, env.payload, t)
            elif channel == "nav_path":
                self._handle_nav_path(ugv, env.payload, t)
            elif channel == "goal_pose":
                self._handle_goal(ugv, env, t)

    def _grantable(self, ugv: UgvState, issuer: str) -> bool:
        return ugv.mode == "idle" or ugv.owner == issuer

    def _handle_mode_request(self, ugv: UgvState, req: ModeRequest,
                             t: float) -> None:
        if req.mode == "idle":
            if ugv.mode == "idle" or ugv.owner == req.issuer:
                ugv.mode = "idle"
                ugv.owner = ""
                ugv.v = ugv.omega = 0.0
                ugv.active_path = None
                ugv.follow_goal = None
            else:
                self._event(ugv.name, "mode_rejected",
                            f"owned by {ugv.owner!r}", req.issuer, t)
            return
        if req.mode not in ("teleoperation", "follow"):
            self._event(ugv.name, "mode_rejected",
                        f"cannot request mode {req.mode!r}", req.issuer, t)
            return
        if not self._grantable(ugv, req.issuer):
            self._event(ugv.name, "mode_rejected",
                        f"owned by {ugv.owner!r}", req.issuer, t)
            return
        ugv.mode = req.mode
        ugv.owner = req.owner or req.issuer
        ugv.v = ugv.omega = 0.0
        ugv.active_path = None
        ugv.follow_goal = None
        if req.mode == "teleoperation":
            ugv.last_twist_stamp = t

    def _handle_nav_path(self, ugv: UgvState, path: NavPath, t: float) -> None:
        if not self._grantable(ugv, path.issuer):
            self._event(ugv.name, "path_rejected",
                        f"owned by {ugv.owner!r}", path.issuer, t)
            return
        if path.frame not in self._anchor_world:
            self._event(ugv.name, "path_rejected",
                        f"unknown frame {path.frame!r}", path.issuer, t)
            return
        world_poses = [self.anchor_to_world(path.frame, p)
                       for p in path.poses]
        ugv.active_path = world_poses
        ugv.path_index = 0
        ugv.mode = "autonomous"
        ugv.owner = path.issuer
        ugv.follow_goal = None
        ugv.path_history = [ugv.pose]
        self._publish_traj_plan(ugv, world_poses, t)

    def _handle_goal(self, ugv: UgvState, env: Envelope, t: float) -> None:
        goal = env.payload
        if ugv.mode != "follow" or env.sender != ugv.owner:
            self._event(ugv.name, "goal_ignored",
                        f"mode={ugv.mode} owner={ugv.owner!r}", env.sender, t)
            return
        if goal.frame not in self._anchor_world:
            self._event(ugv.name, "goal_ignored",
                        f"unknown frame {goal.frame!r}", env.sender, t)
            return
        ugv.follow_goal = self.anchor_to_world(goal.frame, goal)

    def _event(self, agent: str, event: str, detail: str, issuer: str,
               t: float) -> None:
        self._clients[agent].publish(
            f"/{agent}/event", "agent_event",
            AgentEvent(agent=agent, event=event, detail=detail, issuer=issuer),
            t)

    def _publish_traj_plan(self, ugv: UgvState, world_poses: list[FramedPose],
                           t: float) -> None:
        anchor_id = self.closest_anchor_id(ugv.pose)
        poses = [self.world_to_anchor(anchor_id, ugv.pose)]
        poses += [self.world_to_anchor(anchor_id, p) for p in world_poses]
        self._clients[ugv.name].publish(
            f"/{ugv.name}/traj_plan", "nav_path",
            NavPath(frame=anchor_id, poses=poses, issuer=ugv.name), t)

    def _publish_traj_past(self, ugv: UgvState, t: float) -> None:
        if not ugv.path_history:
            return
        anchor_id = self.closest_anchor_id(ugv.pose)
        poses = [self.world_to_anchor(anchor_id, p) for p in ugv.path_history]
        poses.append(self.world_to_anchor(anchor_id, ugv.pose))
        self._clients[ugv.name].publish(
            f"/{ugv.name}/traj_past", "nav_path",
            NavPath(frame=anchor_id, poses=poses, issuer=ugv.name), t)
        ugv.path_history = []

    def _publish_telemetry(self, t: float) -> None:
        for ugv in self.ugvs:
            client = self._clients[ugv.name]
            if ugv.anchored:
                anchor_id = self.closest_anchor_id(ugv.pose)
                rel = self.world_to_anchor(anchor_id, ugv.pose)
                rel = self._with_noise(rel, t)
                client.publish(f"/{ugv.name}/tf", "framed_pose", rel, t)
            else:
                anchor_id = ""
            client.publish(
                f"/{ugv.name}/status", "agent_status",
                AgentStatus(name=ugv.name, kind="UGV",
                            battery_pct=round(ugv.battery_pct, 4),
                            mode=ugv.mode,
                            owner=ugv.owner, closest_anchor=anchor_id), t)
            if ugv.mode in ("autonomous", "follow"):
                ugv.path_history.append(ugv.pose)
            for cam in range(ugv.camera.count):
                client.publish(f"/{ugv.name}/camera/{cam}", "camera_frame",
                               render_camera(self.world, ugv, cam, t), t)
        for walker in self.walkers:
            client = self._clients[walker.name]
            anchor_id = self.closest_anchor_id(walker.pose)
            rel = self.world_to_anchor(anchor_id, walker.pose)
            rel = self._with_noise(rel, t)
            client.publish(f"/{walker.name}/tf", "framed_pose", rel, t)
            client.publish(
                f"/{walker.name}/status", "agent_status",
                AgentStatus(name=walker.name, kind="HMD_USER",
                            battery_pct=round(walker.battery_pct, 4),
                            mode="idle",
                            owner="", closest_anchor=anchor_id), t)

    def _with_noise(self, pose: FramedPose, t: float) -> FramedPose:
        sigma = self.world.tf_noise_sigma
        if sigma <= 0.0:
            return pose
        return FramedPose(frame=pose.frame,
                          x=pose.x + self._rng.gauss(0.0, sigma),
                          y=pose.y + self._rng.gauss(0.0, sigma),
                          yaw=pose.yaw, stamp=t)

    def _sense(self, t: float) -> None:
        for ugv in self.ugvs:
            for idx in visible_objects(self.world, ugv):
                key = (ugv.name, idx)
                if key in self._detected:
                    continue
                self._detected.add(key)
                obj = self.world.objects[idx]
                anchor_id = self.closest_anchor_id(ugv.pose)
                pose = self.world_to_anchor(
                    anchor_id, FramedPose(frame="world", x=obj.x, y=obj.y,
                                          yaw=0.0, stamp=t))
                notice = DetectionNotice(
                    agent=ugv.name, object_label=obj.label, world_pose=pose,
                    snapshot=render_camera(self.world, ugv, 0, t))
                self._clients[ugv.name].publish(
                    f"/{ugv.name}/detection", "detection", notice, t)
