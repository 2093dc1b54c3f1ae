"""Mission metrics, computed purely from a mission log."""

from __future__ import annotations

import math

from .. import frames
from ..messages import AnchorRecord, FramedPose
from .mission_log import MissionLog


def _world_tracker(log: MissionLog):
    """Yields (tick, kind, record, world_poses) while folding the log.

    World poses are reconstructed exactly as the sim produced them: the
    root anchor is the first UGV's spawn pose from the embedded config.
    """
    config = log.header["config"]
    first_ugv = next(a for a in config["agents"] if a["kind"] == "UGV")
    root_world = FramedPose(frame="world", x=first_ugv["spawn"][0],
                            y=first_ugv["spawn"][1],
                            yaw=first_ugv["spawn"][2])
    tree = frames.TransformTree()
    root_id = None
    poses: dict[str, FramedPose] = {}

    for tick, rec in log.iter_envelope_records():
        if rec["rec"] != "env":
            yield tick, rec, poses
            continue
        env = rec["env"]
        kind = env["kind"]
        topic = env["topic"]
        agent = topic.split("/", 2)[1]
        channel = topic.split("/", 2)[2]
        if kind == "anchor_record":
            payload = env["payload"]
            record = AnchorRecord(
                id=payload["id"], created_by=payload["created_by"],
                parent=payload.get("parent"),
                pose_in_parent=None if payload.get("pose_in_parent") is None
                else FramedPose(frame=payload["pose_in_parent"]["frame"],
                                x=payload["pose_in_parent"]["x"],
                                y=payload["pose_in_parent"]["y"],
                                yaw=payload["pose_in_parent"]["yaw"]))
            tree.add_anchor(record)
            if record.parent is None and root_id is None:
                root_id = record.id
        elif kind == "framed_pose" and channel == "tf" and root_id is not None:
            p = env["payload"]
            rel = FramedPose(frame=p["frame"], x=p["x"], y=p["y"],
                             yaw=p["yaw"], stamp=p["stamp"])
            try:
                tree.upsert_transform(rel.frame, agent, rel, env["stamp"])
                in_root = tree.lookup(root_id, agent)
                poses[agent] = frames.compose(root_world, in_root)
            except frames.FrameError:
                pass
        yield tick, rec, poses


def compute_metrics(log: MissionLog) -> dict:
    config = log.header["config"]
    dt = config["world"].get("dt", 0.05)
    operator_names = {op["name"] for op in config["operators"]}
    base = config["world"].get("base", [0.0, 0.0])
    # Unanchored GPS-only assets never publish tf and are exempt from the
    # return-to-base criterion, matching the runner's ground-truth check.
    agent_names = [a["name"] for a in config["agents"]
                   if a.get("anchored", True)]

    detection_stamp = None
    detection_tick = None
    fanout_ops: set[str] = set()
    fanout_latency_ticks = None
    teleop_max = 0.0
    teleop_by_owner: dict[str, float] = {}
    found: set[str] = set()
    envelopes = 0
    final_poses: dict[str, FramedPose] = {}
    statuses: dict[str, dict] = {}

    for tick, rec, poses in _world_tracker(log):
        final_poses = poses
        if rec["rec"] == "env_digest":
            envelopes += 1
            continue
        envelopes += 1
        env = rec["env"]
        kind = env["kind"]
        if kind == "detection":
            found.add(env["payload"]["object_label"])
            if detection_stamp is None:
                detection_stamp = env["stamp"]
                detection_tick = tick
        elif kind == "agent_status":
            status = env["payload"]
            statuses[status["name"]] = status
            if status["mode"] == "teleoperation" and status["owner"]:
                owner_pose = poses.get(status["owner"])
                agent_pose = poses.get(status["name"])
                if owner_pose is not None and agent_pose is not None:
                    d = math.hypot(owner_pose.x - agent_pose.x,
                                   owner_pose.y - agent_pose.y)
                    teleop_max = max(teleop_max, d)
                    teleop_by_owner[status["owner"]] = max(
                        teleop_by_owner.get(status["owner"], 0.0), d)

    # deliveries (detection fan-out) live in their own records
    for trace in log.traces:
        for rec in trace.delivers:
            fanout_ops.update(r for r in rec["recipients"]
                              if r in operator_names)
            if fanout_latency_ticks is None and detection_tick is not None:
                fanout_latency_ticks = rec["tick"] - detection_tick

    return_to_base = {}
    all_at_base = True
    radius = config["success"].get("return_radius", 5.0)
    for name in agent_names:
        pose = final_poses.get(name)
        if pose is None:
            return_to_base[name] = None
            all_at_base = False
            continue
        d = math.hypot(pose.x - base[0], pose.y - base[1])
        return_to_base[name] = d
        if d > radius:
            all_at_base = False

    required = set(config["success"].get("objects_found", []))
    success = required <= found and all_at_base

    duration_ticks = log.traces[-1].tick if log.traces else 0
    return {
        "success": success,
        "duration_s": duration_ticks * dt,
        "time_to_detection_s": detection_stamp,
        "detection_fanout": len(fanout_ops),
        "detection_fanout_latency_s":
            None if fanout_latency_ticks is None
            else fanout_latency_ticks * dt,
        "teleop_max_distance_m": teleop_max,
        "teleop_distance_by_operator": teleop_by_owner,
        "return_to_base_m": return_to_base,
        "all_at_base": all_at_base,
        "objects_found": sorted(found),
        "envelopes_logged": envelopes,
    }
