"""GeoJSON export: agent positions and trajectories on real-world maps.

Agents localized against any anchor are extrapolated through the shared
tree to the geo-referenced anchor and converted to lat/lon.  Agents with
no anchor localization but a configured GPS fix go the other way: the fix
is pulled into the local frame first, so they appear on the same map with
everyone else.
"""

from __future__ import annotations

from .. import frames
from ..frames import NoGeoError, TransformTree
from ..messages import AnchorRecord, FramedPose, GeoPose
from .mission_log import MissionLog


class ExportError(Exception):
    pass


def _build_tree(log: MissionLog):
    tree = TransformTree()
    root_id = None
    latest_status: dict[str, dict] = {}
    trajectories: dict[str, dict[str, list]] = {}
    for _tick, rec in log.iter_envelope_records():
        if rec["rec"] != "env":
            continue
        env = rec["env"]
        kind = env["kind"]
        topic = env["topic"]
        agent = topic.split("/", 2)[1]
        channel = topic.split("/", 2)[2]
        payload = env["payload"]
        if kind == "anchor_record":
            record = AnchorRecord(
                id=payload["id"], created_by=payload["created_by"],
                geo=None if payload.get("geo") is None else GeoPose(
                    lat_deg=payload["geo"]["lat_deg"],
                    lon_deg=payload["geo"]["lon_deg"],
                    heading_deg=payload["geo"]["heading_deg"]),
                parent=payload.get("parent"),
                pose_in_parent=None if payload.get("pose_in_parent") is None
                else FramedPose(frame=payload["pose_in_parent"]["frame"],
                                x=payload["pose_in_parent"]["x"],
                                y=payload["pose_in_parent"]["y"],
                                yaw=payload["pose_in_parent"]["yaw"]))
            tree.add_anchor(record)
            if record.parent is None and root_id is None:
                root_id = record.id
        elif kind == "framed_pose" and channel == "tf":
            pose = FramedPose(frame=payload["frame"], x=payload["x"],
                              y=payload["y"], yaw=payload["yaw"],
                              stamp=payload["stamp"])
            try:
                tree.upsert_transform(pose.frame, agent, pose, env["stamp"])
            except frames.FrameError:
                pass
        elif kind == "agent_status":
            latest_status[payload["name"]] = payload
        elif kind == "nav_path" and channel in ("traj_plan", "traj_past"):
            which = "plan" if channel == "traj_plan" else "past"
            trajectories.setdefault(agent, {})[which] = payload
    return tree, root_id, latest_status, trajectories


def export_geojson(log: MissionLog) -> dict:
    """FeatureCollection: one Point per agent, one LineString per path."""
    config = log.header["config"]
    tree, root_id, statuses, trajectories = _build_tree(log)
    geo_anchor = None
    for anchor_id in sorted(tree.anchors):
        record = tree.anchor(anchor_id)
        if record.geo is not None:
            geo_anchor = record
            break
    if geo_anchor is None:
        raise ExportError("no anchor carries a geodetic pose")

    gps_fixes = {a["name"]: (a["gps_fix"]["lat"], a["gps_fix"]["lon"],
                             a["gps_fix"]["heading"])
                 for a in config["agents"] if "gps_fix" in a}
    kinds = {a["name"]: a["kind"] for a in config["agents"]}
    features = []

    def anchor_relative(agent: str) -> FramedPose | None:
        try:
            return tree.lookup(geo_anchor.id, agent)
        except frames.FrameError:
            return None

    for name in sorted(kinds):
        local = anchor_relative(name)
        via = "anchor"
        if local is None:
            fix = gps_fixes.get(name)
            if fix is None:
                continue
            # Reverse direction: GPS-equipped but never anchor-localized.
            local = frames.from_geo(geo_anchor, fix)
            via = "gps_fix"
        try:
            lat, lon, heading = frames.to_geo(geo_anchor, local)
        except NoGeoError:  # pragma: no cover - geo_anchor has geo
            continue
        status = statuses.get(name, {})
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {"name": name, "kind": kinds[name],
                           "mode": status.get("mode", "unknown"),
                           "battery_pct": status.get("battery_pct"),
                           "heading_deg": heading, "localized_via": via},
        })

    for agent in sorted(trajectories):
        for which, path in sorted(trajectories[agent].items()):
            coords = []
            for p in path["poses"]:
                pose = FramedPose(frame=path["frame"], x=p["x"], y=p["y"],
                                  yaw=p["yaw"])
                try:
                    base = tree.lookup(geo_anchor.id, path["frame"])
                except frames.FrameError:
                    break
                local = frames.compose(base, pose)
                lat, lon, _ = frames.to_geo(geo_anchor, local)
                coords.append([lon, lat])
            if len(coords) >= 2:
                features.append({
                    "type": "Feature",
                    "geometry": {"type": "LineString", "coordinates": coords},
                    "properties": {"name": agent, "track": which},
                })

    return {"type": "FeatureCollection", "features": features}
