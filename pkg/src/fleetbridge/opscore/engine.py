"""Headless operator-interaction engine.

One instance per operator.  It consumes relay envelopes (status, tf,
anchors, detections, trajectories, events) and UI events (clicks, drags,
typed commands), and produces command envelopes plus a per-UI-frame view
model.  No rendering here: the browser console and the scripted mission
operators drive the exact same reducer, so a headless test and a console
session emit byte-identical envelopes for the same event timeline.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .. import frames
from ..bus import CoreClient
from ..frames import NoPathError, TransformTree
from ..messages import (
    Envelope,
    FramedPose,
    GeoPose,
    ModeRequest,
    TwistCommand,
    UiEvent,
    ViewModel,
    wrap_angle,
)
from ..relay.core import RelayCore
from . import waypoints as wp
from .joystick import joystick_to_twist
from .labels import can_interact, label_view

FOLLOW_BEHIND_M = 1.0
UI_PERIOD_S = 0.1
PENDING_TIMEOUT_S = 1.5
DEFAULT_LIMITS = (1.0, 1.5)

TRAJ_VIEW_MAX_POINTS = 120


@dataclass
class PendingRequest:
    mode: str
    sent_at: float


class OwnershipLedger:
    """Last reported (mode, owner) per agent plus this operator's pending
    requests; commands from non-owners are rejected unless the agent idles."""

    def __init__(self, operator: str):
        self.operator = operator
        self.statuses: dict[str, object] = {}
        self.status_stamps: dict[str, float] = {}
        self.pending: dict[str, PendingRequest] = {}

    def can_command(self, agent: str) -> tuple[bool, str]:
        status = self.statuses.get(agent)
        if status is None:
            return (False, f"no status for {agent!r} yet")
        if status.mode == "idle" or status.owner == self.operator:
            return (True, "")
        return (False, f"owned by {status.owner!r}")


class OperatorEngine:
    def __init__(self, operator: str, core: RelayCore,
                 limits: tuple[float, float] = DEFAULT_LIMITS,
                 gps_fixes: dict[str, tuple[float, float, float]] | None = None,
                 ui_period_s: float = UI_PERIOD_S):
        self.operator = operator
        self.limits = limits
        self.ui_period_s = ui_period_s
        self.client = CoreClient(core, operator)
        for pattern in ("/*/status", "/*/tf", "/*/anchor", "/*/detection",
                        "/*/traj_plan", "/*/traj_past", "/*/event",
                        "/*/camera/*", f"/{operator}/ui"):
            self.client.subscribe(pattern)
        self.tree = TransformTree()
        self.root: str | None = None
        self.ledger = OwnershipLedger(operator)
        self.gps_fixes = gps_fixes or {}
        self.teleop_agent: str | None = None
        self.teleop_engaged = False
        self._joystick: tuple[float, float, float] | None = None
        self.live_view: tuple[str, int] | None = None
        self.follow_agents: list[str] = []
        self.goal_markers: dict[str, tuple[float, float]] = {}
        self.draft: wp.WaypointDraft | None = None
        self.expanded: set[str] = set()
        self.detections: list[dict] = []
        self.trajectories: dict[str, dict[str, list]] = {}
        self.confirmations: deque = deque(maxlen=20)
        self.camera_seen: dict[str, dict] = {}
        self._last_seq: dict[tuple[str, str], int] = {}
        self._frame_seq = 0

    # --- inbound ------------------------------------------------------------

    def ingest_inbox(self, t: float) -> None:
        for env in self.client.drain():
            self.ingest(env, t)

    def ingest(self, env: Envelope, t: float) -> None:
        key = (env.sender, env.topic)
        last = self._last_seq.get(key)
        if last is not None and env.seq <= last:
            return  # stale or duplicate
        self._last_seq[key] = env.seq
        channel = env.topic.split("/", 2)[2]
        agent = env.topic.split("/", 2)[1]
        if env.kind == "anchor_record":
            self.tree.add_anchor(env.payload)
            if env.payload.parent is None and self.root is None:
                self.root = env.payload.id
        elif env.kind == "framed_pose" and channel == "tf":
            try:
                self.tree.upsert_transform(env.payload.frame, agent,
                                           env.payload, env.stamp)
            except NoPathError:
                pass  # anchor not seen yet
        elif env.kind == "agent_status":
            self._ingest_status(env, t)
        elif env.kind == "detection":
            self._ingest_detection(env)
        elif env.kind == "nav_path" and channel in ("traj_plan", "traj_past"):
            which = "plan" if channel == "traj_plan" else "past"
            self.trajectories.setdefault(agent, {})[which] = \
                self._path_to_root_points(env.payload)
        elif env.kind == "agent_event":
            self._ingest_agent_event(env, t)
        elif env.kind == "camera_frame":
            self.camera_seen[agent] = {"camera": env.payload.camera_index,
                                       "stamp": env.stamp}
        elif env.kind == "ui_event" and env.topic == f"/{self.operator}/ui":
            self.handle_ui(env.payload, env.stamp)

    def _ingest_status(self, env: Envelope, t: float) -> None:
        status = env.payload
        self.ledger.statuses[status.name] = status
        self.ledger.status_stamps[status.name] = env.stamp
        pending = self.ledger.pending.get(status.name)
        if pending is not None:
            confirmed = status.mode == pending.mode and (
                pending.mode == "idle" or status.owner == self.operator)
            if confirmed:
                del self.ledger.pending[status.name]
                self._on_request_confirmed(status.name, pending.mode, env.stamp)
            elif env.stamp - pending.sent_at > PENDING_TIMEOUT_S:
                del self.ledger.pending[status.name]
                self._confirm(env.stamp, "request_timeout", status.name,
                              pending.mode)
        # Lose grants that the agent reports gone (watchdog, preemption).
        if self.teleop_agent == status.name and self.teleop_engaged:
            if status.mode != "teleoperation" or status.owner != self.operator:
                self.teleop_agent = None
                self.teleop_engaged = False
                self._joystick = None
                self._confirm(env.stamp, "teleop_lost", status.name, "")
        if status.name in self.follow_agents:
            if status.mode != "follow" or status.owner != self.operator:
                self.follow_agents.remove(status.name)
                self.goal_markers.pop(status.name, None)
                self._confirm(env.stamp, "follow_lost", status.name, "")

    def _on_request_confirmed(self, agent: str, mode: str, t: float) -> None:
        if mode == "teleoperation":
            self.teleop_agent = agent
            self.teleop_engaged = True
            self._confirm(t, "teleop_confirmed", agent, "")
        elif mode == "follow":
            if agent not in self.follow_agents:
                self.follow_agents.append(agent)
            self._confirm(t, "follow_confirmed", agent, "audible_confirmation")
        elif mode == "idle":
            self._confirm(t, "idle_confirmed", agent, "")

    def _ingest_detection(self, env: Envelope) -> None:
        notice = env.payload
        point = self._to_root_point(notice.world_pose)
        self.detections.append({
            "agent": notice.agent, "label": notice.object_label,
            "x": round(point[0], 3), "y": round(point[1], 3),
            "stamp": env.stamp})
        self._confirm(env.stamp, "detection_banner", notice.agent,
                      notice.object_label)

    def _ingest_agent_event(self, env: Envelope, t: float) -> None:
        event = env.payload
        if event.issuer != self.operator:
            return
        if event.event in ("mode_rejected", "path_rejected", "goal_ignored",
                           "command_ignored"):
            self.ledger.pending.pop(event.agent, None)
            if self.teleop_agent == event.agent and event.event == "mode_rejected":
                self.teleop_agent = None
                self.teleop_engaged = False
                self._joystick = None
            self._confirm(env.stamp, event.event, event.agent, event.detail)

    # --- poses --------------------------------------------------------------

    def user_pose(self) -> FramedPose | None:
        return self.agent_pose(self.operator)

    def agent_pose(self, agent: str) -> FramedPose | None:
        """Agent pose in the root frame, via the tree or a GPS fix."""
        if self.root is None:
            return None
        try:
            return self.tree.lookup(self.root, agent)
        except NoPathError:
            pass
        fix = self.gps_fixes.get(agent)
        if fix is None:
            return None
        geo_anchor = self._geo_anchor()
        if geo_anchor is None:
            return None
        local = frames.from_geo(geo_anchor, fix)
        try:
            anchor_in_root = self.tree.lookup(self.root, geo_anchor.id)
        except NoPathError:
            return None
        p = frames.compose(anchor_in_root, local)
        return FramedPose(frame=self.root, x=p.x, y=p.y, yaw=p.yaw)

    def _geo_anchor(self):
        for anchor_id in sorted(self.tree.anchors):
            record = self.tree.anchor(anchor_id)
            if record.geo is not None:
                return record
        return None

    def _to_root_point(self, pose: FramedPose) -> tuple[float, float]:
        if self.root is None or pose.frame == self.root:
            return (pose.x, pose.y)
        try:
            base = self.tree.lookup(self.root, pose.frame)
        except NoPathError:
            return (pose.x, pose.y)
        p = frames.compose(base, pose)
        return (p.x, p.y)

    def _path_to_root_points(self, path) -> list[list[float]]:
        points = [[round(x, 2), round(y, 2)]
                  for x, y in (self._to_root_point(p) for p in path.poses)]
        if len(points) > TRAJ_VIEW_MAX_POINTS:
            stride = math.ceil(len(points) / TRAJ_VIEW_MAX_POINTS)
            sampled = points[::stride]
            if sampled[-1] != points[-1]:
                sampled.append(points[-1])
            points = sampled
        return points

    # --- UI events ----------------------------------------------------------

    def handle_ui(self, event: UiEvent, t: float) -> None:
        handler = getattr(self, f"_ui_{event.event}", None)
        if handler is None:
            self._confirm(t, "unknown_ui_event", event.agent, event.event)
            return
        handler(event, t)

    def _gate(self, agent: str, t: float, action: str) -> bool:
        ok, reason = self.ledger.can_command(agent)
        if not ok:
            self._confirm(t, f"{action}_rejected", agent, reason)
        return ok

    def _request_mode(self, agent: str, mode: str, t: float) -> None:
        owner = self.operator if mode in ("teleoperation", "follow") else ""
        self.client.publish(f"/{agent}/mode", "mode_request",
                            ModeRequest(mode=mode, issuer=self.operator,
                                        owner=owner), t)
        self.ledger.pending[agent] = PendingRequest(mode=mode, sent_at=t)

    def _ui_begin_teleop(self, event: UiEvent, t: float) -> None:
        if not self._gate(event.agent, t, "teleop"):
            return
        self.teleop_agent = event.agent
        self.teleop_engaged = False
        self._request_mode(event.agent, "teleoperation", t)

    def _ui_end_teleop(self, event: UiEvent, t: float) -> None:
        agent = event.agent or self.teleop_agent
        if agent is None:
            return
        if self.teleop_engaged:
            self._publish_twist(agent, (0.0, 0.0, 0.0), t)
        self.teleop_agent = None
        self.teleop_engaged = False
        self._joystick = None
        self._request_mode(agent, "idle", t)

    def _ui_joystick(self, event: UiEvent, t: float) -> None:
        if not self.teleop_engaged or self.teleop_agent != event.agent:
            return
        data = event.data
        self._joystick = (float(data.get("dx", 0.0)),
                          float(data.get("dy", 0.0)),
                          float(data.get("dyaw", 0.0)))

    def _ui_joystick_release(self, event: UiEvent, t: float) -> None:
        self._joystick = None
        if self.teleop_engaged and self.teleop_agent is not None:
            self._publish_twist(self.teleop_agent, (0.0, 0.0, 0.0), t)

    def _publish_twist(self, agent: str, offset, t: float) -> None:
        twist = joystick_to_twist(offset, self.limits, self.operator)
        self.client.publish(f"/{agent}/cmd_vel", "twist", twist, t)

    def _ui_open_live_view(self, event: UiEvent, t: float) -> None:
        self.live_view = (event.agent, int(event.data.get("camera", 0)))
        self._confirm(t, "live_view_open", event.agent, "")

    def _ui_close_live_view(self, event: UiEvent, t: float) -> None:
        self.live_view = None

    def _ui_open_label(self, event: UiEvent, t: float) -> None:
        self.expanded.add(event.agent)

    def _ui_close_label(self, event: UiEvent, t: float) -> None:
        self.expanded.discard(event.agent)

    def _ui_waypoint_open(self, event: UiEvent, t: float) -> None:
        user = self.user_pose()
        if user is None:
            self._confirm(t, "waypoint_rejected", event.agent, "no user pose")
            return
        self.draft = wp.waypoint_open(user, event.agent)

    def _ui_waypoint_lock(self, event: UiEvent, t: float) -> None:
        if self.draft is not None:
            self.draft.locked = True

    def _ui_waypoint_unlock(self, event: UiEvent, t: float) -> None:
        if self.draft is not None:
            self.draft.locked = False
            user = self.user_pose()
            if user is not None:
                wp.waypoint_track(self.draft, user)

    def _ui_waypoint_adjust(self, event: UiEvent, t: float) -> None:
        if self.draft is None:
            return
        wp.waypoint_adjust(self.draft, int(event.data.get("steps", 0)),
                           self.user_pose())

    def _ui_waypoint_add(self, event: UiEvent, t: float) -> None:
        if self.draft is None:
            return
        wp.waypoint_add(self.draft)

    def _ui_waypoint_cancel(self, event: UiEvent, t: float) -> None:
        self.draft = None

    def _ui_waypoint_send(self, event: UiEvent, t: float) -> None:
        if self.draft is None or not self.draft.markers:
            self._confirm(t, "send_rejected", "", "empty draft")
            return
        target = self.draft.target_agent
        if not self._gate(target, t, "path"):
            return
        status = self.ledger.statuses.get(target)
        anchor = (status.closest_anchor if status and status.closest_anchor
                  else self.root)
        try:
            path = wp.waypoint_path(self.draft, self.tree, anchor,
                                    self.operator)
        except (NoPathError, ValueError) as exc:
            self._confirm(t, "send_rejected", target, str(exc))
            return
        self.client.publish(f"/{target}/nav_path", "nav_path", path, t)
        self._confirm(t, "path_sent", target,
                      f"{len(path.poses)} waypoints; markers_green; chime")
        self.draft = None

    def _ui_follow_me(self, event: UiEvent, t: float) -> None:
        if not self._gate(event.agent, t, "follow"):
            return
        self._request_mode(event.agent, "follow", t)

    def _ui_stop(self, event: UiEvent, t: float) -> None:
        agent = event.agent
        if agent in self.follow_agents:
            self.follow_agents.remove(agent)
            self.goal_markers.pop(agent, None)
        self._request_mode(agent, "idle", t)
        self._confirm(t, "stop_sent", agent, "")

    # --- periodic frame -----------------------------------------------------

    def emit_frame(self, t: float) -> None:
        """Per-UI-frame outputs: cursor tracking, twists, goals, view model."""
        user = self.user_pose()
        if self.draft is not None and not self.draft.locked and user is not None:
            wp.waypoint_track(self.draft, user)
        if self.teleop_engaged and self.teleop_agent is not None \
                and self._joystick is not None:
            self._publish_twist(self.teleop_agent, self._joystick, t)
        if user is not None:
            for agent in list(self.follow_agents):
                self._publish_follow_goal(agent, user, t)
        self._publish_view(t)

    def _publish_follow_goal(self, agent: str, user: FramedPose,
                             t: float) -> None:
        goal_root = FramedPose(
            frame=user.frame,
            x=user.x - FOLLOW_BEHIND_M * math.cos(user.yaw),
            y=user.y - FOLLOW_BEHIND_M * math.sin(user.yaw),
            yaw=user.yaw, stamp=t)
        status = self.ledger.statuses.get(agent)
        anchor = (status.closest_anchor if status and status.closest_anchor
                  else self.root)
        try:
            anchor_from_root = self.tree.lookup(anchor, self.root)
        except NoPathError:
            return
        g = frames.compose(anchor_from_root, goal_root)
        self.client.publish(
            f"/{agent}/goal_pose", "goal_pose",
            FramedPose(frame=anchor, x=g.x, y=g.y, yaw=g.yaw, stamp=t), t)
        self.goal_markers[agent] = (goal_root.x, goal_root.y)

    def view_model_data(self, t: float) -> dict:
        user = self.user_pose()
        agents = []
        for name in sorted(self.ledger.statuses):
            if name == self.operator:
                continue
            status = self.ledger.statuses[name]
            pose = self.agent_pose(name)
            entry = {
                "name": name, "kind": status.kind,
                "battery_pct": status.battery_pct, "mode": status.mode,
                "owner": status.owner, "closest_anchor": status.closest_anchor,
                "pose": None, "distance": None, "label": None,
                "camera": self.camera_seen.get(name),
            }
            if pose is not None:
                entry["pose"] = {"x": round(pose.x, 4), "y": round(pose.y, 4),
                                 "yaw": round(pose.yaw, 4)}
            if pose is not None and user is not None:
                entry["distance"] = round(math.hypot(pose.x - user.x,
                                                     pose.y - user.y), 3)
                lv = label_view(user, pose, status,
                                expanded=name in self.expanded)
                entry["label"] = {
                    "attached": lv.attached,
                    "render_distance": round(lv.render_distance, 3),
                    "scale": round(lv.scale, 4),
                    "bearing": round(lv.bearing, 4),
                    "color": lv.color, "expanded": lv.expanded,
                    "interactable": can_interact(lv),
                }
            agents.append(entry)
        anchors = []
        for anchor_id in sorted(self.tree.anchors):
            record = self.tree.anchor(anchor_id)
            entry = {"id": anchor_id, "geo": None, "pose": None}
            if record.geo is not None:
                entry["geo"] = {"lat_deg": record.geo.lat_deg,
                                "lon_deg": record.geo.lon_deg,
                                "heading_deg": record.geo.heading_deg}
            if self.root is not None:
                try:
                    p = self.tree.lookup(self.root, anchor_id)
                    entry["pose"] = {"x": round(p.x, 4), "y": round(p.y, 4),
                                     "yaw": round(p.yaw, 4)}
                except NoPathError:
                    pass
            anchors.append(entry)
        draft = None
        if self.draft is not None:
            draft = {
                "target_agent": self.draft.target_agent,
                "locked": self.draft.locked,
                "cursor_distance": self.draft.cursor_distance,
                "cursor": {"x": self.draft.cursor.x, "y": self.draft.cursor.y,
                           "yaw": self.draft.cursor.yaw},
                "markers": [{"x": m.x, "y": m.y, "yaw": m.yaw}
                            for m in self.draft.markers],
            }
        return {
            "t": t,
            "root": self.root,
            "user": None if user is None else
            {"x": round(user.x, 4), "y": round(user.y, 4),
             "yaw": round(user.yaw, 4)},
            "agents": agents,
            "anchors": anchors,
            "draft": draft,
            "teleop": None if self.teleop_agent is None else
            {"agent": self.teleop_agent, "engaged": self.teleop_engaged},
            "follow": list(self.follow_agents),
            "live_view": None if self.live_view is None else
            {"agent": self.live_view[0], "camera": self.live_view[1]},
            "detections": self.detections,
            "trajectories": self.trajectories,
            "goal_markers": {k: [round(v[0], 3), round(v[1], 3)]
                             for k, v in sorted(self.goal_markers.items())},
            "pending": {a: p.mode
                        for a, p in sorted(self.ledger.pending.items())},
            "confirmations": list(self.confirmations),
        }

    def _publish_view(self, t: float) -> None:
        self._frame_seq += 1
        self.client.publish(
            f"/{self.operator}/view", "view_model",
            ViewModel(operator=self.operator, frame_seq=self._frame_seq,
                      data=self.view_model_data(t)), t)

    def _confirm(self, t: float, event: str, agent: str, detail: str) -> None:
        self.confirmations.append({"t": t, "event": event, "agent": agent,
                                   "detail": detail})

    # --- tick driver ----------------------------------------------------------

    def on_tick(self, tick: int, t: float, period_ticks: int) -> None:
        self.ingest_inbox(t)
        if tick % period_ticks == 0:
            self.emit_frame(t)
