"""Scenario configuration: schema, loading, validation, construction.

One YAML file declares the world, the agents, the preplaced anchors, the
operator scripts, and the success criteria.  The first UGV's spawn pose
becomes the auto-placed root anchor "asa_0"; anchors listed in the file
are preplaced extras and may carry a geodetic fix.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import jsonschema
import yaml

from ..messages import AnchorRecord, FramedPose, GeoPose, UiEvent, canonical_json
from ..simworld import (
    Box,
    CameraSpec,
    RouteKey,
    SensorSpec,
    UgvState,
    WalkerState,
    WorldModel,
    WorldObject,
)

CONFIG_VERSION = 1
ROOT_ANCHOR_ID = "asa_0"

_GEO = {
    "type": "object",
    "required": ["lat", "lon", "heading"],
    "properties": {"lat": {"type": "number"}, "lon": {"type": "number"},
                   "heading": {"type": "number"}},
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["version", "name", "world", "agents", "operators", "success"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "name": {"type": "string", "minLength": 1},
        "world": {
            "type": "object",
            "required": ["extent"],
            "additionalProperties": False,
            "properties": {
                "extent": {"type": "array", "minItems": 2, "maxItems": 2,
                           "items": {"type": "number", "exclusiveMinimum": 0}},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer"},
                "tf_noise_sigma": {"type": "number", "minimum": 0},
                "base": {"type": "array", "minItems": 2, "maxItems": 2,
                         "items": {"type": "number"}},
                "obstacles": {"type": "array", "items": {
                    "type": "array", "minItems": 4, "maxItems": 4,
                    "items": {"type": "number"}}},
                "objects": {"type": "array", "items": {
                    "type": "object",
                    "required": ["label", "x", "y"],
                    "additionalProperties": False,
                    "properties": {"label": {"type": "string"},
                                   "x": {"type": "number"},
                                   "y": {"type": "number"},
                                   "radius": {"type": "number"}}}},
            },
        },
        "anchors": {"type": "array", "items": {
            "type": "object",
            "required": ["id", "x", "y", "yaw"],
            "additionalProperties": False,
            "properties": {"id": {"type": "string", "minLength": 1},
                           "x": {"type": "number"}, "y": {"type": "number"},
                           "yaw": {"type": "number"}, "geo": _GEO}}},
        "agents": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "required": ["name", "kind", "spawn"],
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string", "minLength": 1},
                "kind": {"enum": ["UGV", "HMD_USER"]},
                "spawn": {"type": "array", "minItems": 3, "maxItems": 3,
                          "items": {"type": "number"}},
                "v_max": {"type": "number", "exclusiveMinimum": 0},
                "omega_max": {"type": "number", "exclusiveMinimum": 0},
                "battery": {"type": "number", "minimum": 0, "maximum": 100},
                "drain_pct_per_min": {"type": "number", "minimum": 0},
                "sensor": {"type": "object", "additionalProperties": False,
                           "properties": {
                               "half_angle_deg": {"type": "number"},
                               "range_m": {"type": "number"}}},
                "camera": {"type": "object", "additionalProperties": False,
                           "properties": {
                               "width": {"type": "integer", "minimum": 4},
                               "height": {"type": "integer", "minimum": 4},
                               "count": {"type": "integer", "minimum": 0}}},
                "anchored": {"type": "boolean"},
                "gps_fix": _GEO,
                "route": {"type": "array", "items": {
                    "type": "object",
                    "required": ["t", "x", "y"],
                    "additionalProperties": False,
                    "properties": {"t": {"type": "number", "minimum": 0},
                                   "x": {"type": "number"},
                                   "y": {"type": "number"},
                                   "yaw": {"type": "number"}}}},
            },
        }},
        "operators": {"type": "array", "minItems": 0, "items": {
            "type": "object",
            "required": ["name"],
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string", "minLength": 1},
                "limits": {"type": "array", "minItems": 2, "maxItems": 2,
                           "items": {"type": "number", "exclusiveMinimum": 0}},
                "script": {"oneOf": [
                    {"const": "interactive"},
                    {"type": "array", "items": {
                        "type": "object",
                        "required": ["t", "event"],
                        "additionalProperties": False,
                        "properties": {
                            "t": {"type": "number", "minimum": 0},
                            "event": {"type": "string", "minLength": 1},
                            "agent": {"type": "string"},
                            "data": {"type": "object"}}}},
                ]},
            },
        }},
        "success": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "objects_found": {"type": "array",
                                  "items": {"type": "string"}},
                "return_radius": {"type": "number", "exclusiveMinimum": 0},
                "deadline": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


class ConfigError(Exception):
    """Invalid scenario config; message carries the field path."""


@dataclass
class OperatorSpec:
    name: str
    limits: tuple[float, float]
    interactive: bool
    script: list[tuple[float, UiEvent]] = field(default_factory=list)


@dataclass
class ScenarioConfig:
    raw: dict
    name: str
    world: WorldModel
    base: tuple[float, float]
    anchors: list[AnchorRecord]
    ugvs: list[UgvState]
    walkers: list[WalkerState]
    gps_fixes: dict[str, tuple[float, float, float]]
    operators: list[OperatorSpec]
    objects_found: list[str]
    return_radius: float
    deadline: float

    @property
    def dt(self) -> float:
        return self.world.dt

    def config_sha256(self) -> str:
        return hashlib.sha256(canonical_json(self.raw)).hexdigest()


def _fail(path: str, reason: str) -> None:
    raise ConfigError(f"{path}: {reason}")


def load_scenario(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    return parse_scenario(raw)


def parse_scenario(raw: dict) -> ScenarioConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {err.message}")

    world_raw = raw["world"]
    world = WorldModel(
        extent=tuple(world_raw["extent"]),
        obstacles=[Box(*o) for o in world_raw.get("obstacles", [])],
        objects=[WorldObject(label=o["label"], x=o["x"], y=o["y"],
                             radius=o.get("radius", 0.4))
                 for o in world_raw.get("objects", [])],
        seed=world_raw.get("seed", 0),
        dt=world_raw.get("dt", 0.05),
        tf_noise_sigma=world_raw.get("tf_noise_sigma", 0.0),
    )
    try:
        world.validate()
    except ValueError as exc:
        _fail("world", str(exc))
    period = 0.1 / world.dt
    if abs(period - round(period)) > 1e-9:
        _fail("world.dt", "0.1 s must be an integer number of physics steps")

    names = set()
    ugvs, walkers = [], []
    gps_fixes = {}
    for i, a in enumerate(raw["agents"]):
        if a["name"] in names:
            _fail(f"agents[{i}].name", f"duplicate agent {a['name']!r}")
        names.add(a["name"])
        spawn = FramedPose(frame="world", x=a["spawn"][0], y=a["spawn"][1],
                           yaw=a["spawn"][2])
        if a["kind"] == "UGV":
            sensor_raw = a.get("sensor", {})
            camera_raw = a.get("camera", {})
            ugvs.append(UgvState(
                name=a["name"], pose=spawn,
                v_max=a.get("v_max", 1.0),
                omega_max=a.get("omega_max", 1.5),
                battery_pct=a.get("battery", 100.0),
                drain_pct_per_min=a.get("drain_pct_per_min", 0.2),
                sensor=SensorSpec(
                    half_angle=math.radians(
                        sensor_raw.get("half_angle_deg", 35.0)),
                    range_m=sensor_raw.get("range_m", 25.0)),
                camera=CameraSpec(width=camera_raw.get("width", 64),
                                  height=camera_raw.get("height", 48),
                                  count=camera_raw.get("count", 1)),
                anchored=a.get("anchored", True),
            ))
        else:
            if "route" in a and a["route"]:
                if (a["route"][0]["x"], a["route"][0]["y"]) != \
                        (spawn.x, spawn.y):
                    _fail(f"agents[{i}].route", "first key must match spawn")
            walkers.append(WalkerState(
                name=a["name"], pose=spawn,
                route=[RouteKey(t=k["t"], x=k["x"], y=k["y"],
                                yaw=k.get("yaw")) for k in a.get("route", [])],
                battery_pct=a.get("battery", 100.0),
                drain_pct_per_min=a.get("drain_pct_per_min", 0.1),
            ))
        if "gps_fix" in a:
            fix = a["gps_fix"]
            gps_fixes[a["name"]] = (fix["lat"], fix["lon"], fix["heading"])

    if not ugvs:
        _fail("agents", "at least one UGV is required (it places the anchor)")

    anchors = [AnchorRecord(id=ROOT_ANCHOR_ID, created_by=ugvs[0].name,
                            pose_in_world=ugvs[0].pose)]
    seen_anchor_ids = {ROOT_ANCHOR_ID}
    for i, a in enumerate(raw.get("anchors", [])):
        if a["id"] in seen_anchor_ids:
            _fail(f"anchors[{i}].id",
                  f"{a['id']!r} duplicates an existing anchor "
                  f"({ROOT_ANCHOR_ID!r} is auto-placed)")
        seen_anchor_ids.add(a["id"])
        geo = None
        if "geo" in a:
            geo = GeoPose(lat_deg=a["geo"]["lat"], lon_deg=a["geo"]["lon"],
                          heading_deg=a["geo"]["heading"])
        anchors.append(AnchorRecord(
            id=a["id"], created_by="preplaced", geo=geo,
            pose_in_world=FramedPose(frame="world", x=a["x"], y=a["y"],
                                     yaw=a["yaw"])))

    walker_names = {w.name for w in walkers}
    operators = []
    for i, op in enumerate(raw["operators"]):
        if op["name"] not in walker_names:
            _fail(f"operators[{i}].name",
                  f"no HMD_USER agent named {op['name']!r}")
        interactive = op.get("script", []) == "interactive"
        script = []
        if not interactive:
            for j, ev in enumerate(op.get("script", [])):
                script.append((float(ev["t"]),
                               UiEvent(event=ev["event"],
                                       agent=ev.get("agent", ""),
                                       data=ev.get("data", {}))))
            script.sort(key=lambda item: item[0])
        operators.append(OperatorSpec(
            name=op["name"],
            limits=tuple(op.get("limits", [1.0, 1.5])),
            interactive=interactive, script=script))

    success = raw["success"]
    known_labels = {o.label for o in world.objects}
    for j, label in enumerate(success.get("objects_found", [])):
        if label not in known_labels:
            _fail(f"success.objects_found[{j}]",
                  f"no world object labeled {label!r}")

    return ScenarioConfig(
        raw=raw,
        name=raw["name"],
        world=world,
        base=tuple(world_raw.get("base", (0.0, 0.0))),
        anchors=anchors,
        ugvs=ugvs,
        walkers=walkers,
        gps_fixes=gps_fixes,
        operators=operators,
        objects_found=list(success.get("objects_found", [])),
        return_radius=success.get("return_radius", 5.0),
        deadline=success.get("deadline", 600.0),
    )
