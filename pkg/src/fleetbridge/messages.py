"""Wire message schemas and canonical serialization.

Everything exchanged between the relay, the simulator, operator engines,
the CLI, and the browser console is an Envelope carried as a
length-prefixed JSON text frame:

    [4-byte big-endian length][UTF-8 JSON object of that length]

The JSON form is canonical: object keys sorted, no whitespace, ASCII-only
output, NaN/inf rejected.  Equal envelopes therefore always encode to
identical bytes, which the mission log digests rely on.

Topic grammar is "/<agent>/<channel>".  Channels in use: status, tf,
cmd_vel, nav_path, goal_pose, camera/<n>, detection, traj_past,
traj_plan, mode, anchor, event, ui, view.

Unknown payload kinds decode to a plain dict and re-encode losslessly so
old nodes can route messages from newer ones.
"""

from __future__ import annotations

import base64
import json
import math
import struct
from dataclasses import dataclass, field, fields

TAU = 2.0 * math.pi

AGENT_KINDS = ("UGV", "HMD_USER")
CONTROL_MODES = ("idle", "teleoperation", "autonomous", "follow")

# Wire sanity bound on commanded velocities, not a platform limit.
TWIST_WIRE_LIMIT = 5.0


class MessageError(Exception):
    """Base class for wire-layer failures."""


class ValidationError(MessageError):
    """An envelope or payload violates its schema invariants."""

    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        self.reason = reason
        super().__init__(f"{field_name}: {reason}")


class FrameError(MessageError):
    """Byte stream does not contain a well-formed frame."""


class DecodeError(MessageError):
    """Frame parsed but the JSON does not match the envelope schema."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


def wrap_angle(a: float) -> float:
    """Normalize an angle in radians into (-pi, pi]."""
    r = a % TAU
    if r > math.pi:
        r -= TAU
    return r


def _require(cond: bool, field_name: str, reason: str) -> None:
    if not cond:
        raise ValidationError(field_name, reason)


def _finite(value, field_name: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             field_name, "must be a number")
    v = float(value)
    _require(math.isfinite(v), field_name, "must be finite")
    return v


@dataclass(frozen=True)
class FramedPose:
    """A planar pose (position + yaw) relative to a named frame at a time."""

    frame: str
    x: float
    y: float
    yaw: float
    stamp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))
        object.__setattr__(self, "stamp", float(self.stamp))

    def validate(self) -> None:
        _require(bool(self.frame), "frame", "must be non-empty")
        _finite(self.x, "x")
        _finite(self.y, "y")
        _finite(self.stamp, "stamp")
        yaw = _finite(self.yaw, "yaw")
        _require(-math.pi < yaw <= math.pi, "yaw", "must be normalized to (-pi, pi]")


@dataclass
class AgentStatus:
    """Team-member heartbeat: identity, battery, control mode, ownership."""

    name: str
    kind: str
    battery_pct: float
    mode: str
    owner: str = ""
    closest_anchor: str = ""

    def validate(self) -> None:
        _require(bool(self.name), "name", "must be non-empty")
        _require(self.kind in AGENT_KINDS, "kind", f"must be one of {AGENT_KINDS}")
        battery = _finite(self.battery_pct, "battery_pct")
        _require(0.0 <= battery <= 100.0, "battery_pct", "must be in [0, 100]")
        _require(self.mode in CONTROL_MODES, "mode", f"must be one of {CONTROL_MODES}")
        if self.mode in ("teleoperation", "follow"):
            _require(bool(self.owner), "owner",
                     f"must be non-empty when mode={self.mode}")


@dataclass
class TwistCommand:
    """Commanded (linear, angular) velocity pair for a ground vehicle."""

    linear_mps: float
    angular_rps: float
    issuer: str

    def validate(self) -> None:
        lin = _finite(self.linear_mps, "linear_mps")
        ang = _finite(self.angular_rps, "angular_rps")
        _require(abs(lin) <= TWIST_WIRE_LIMIT, "linear_mps",
                 f"|value| must be <= {TWIST_WIRE_LIMIT}")
        _require(abs(ang) <= TWIST_WIRE_LIMIT, "angular_rps",
                 f"|value| must be <= {TWIST_WIRE_LIMIT}")
        _require(bool(self.issuer), "issuer", "must be non-empty")


@dataclass
class NavPath:
    """Ordered pose sequence, all expressed in one frame."""

    frame: str
    poses: list[FramedPose]
    issuer: str

    def validate(self) -> None:
        _require(bool(self.frame), "frame", "must be non-empty")
        _require(len(self.poses) > 0, "poses", "must be non-empty")
        _require(bool(self.issuer), "issuer", "must be non-empty")
        for i, pose in enumerate(self.poses):
            pose.validate()
            _require(pose.frame == self.frame, f"poses[{i}].frame",
                     f"must equal path frame {self.frame!r}")


@dataclass
class CameraFrame:
    """Raw RGB8 raster from one agent camera."""

    agent: str
    camera_index: int
    width: int
    height: int
    pixels: bytes
    stamp: float = 0.0

    def validate(self) -> None:
        _require(bool(self.agent), "agent", "must be non-empty")
        _require(isinstance(self.camera_index, int) and self.camera_index >= 0,
                 "camera_index", "must be an integer >= 0")
        _require(isinstance(self.width, int) and self.width > 0,
                 "width", "must be a positive integer")
        _require(isinstance(self.height, int) and self.height > 0,
                 "height", "must be a positive integer")
        expect = self.width * self.height * 3
        _require(len(self.pixels) == expect, "pixels",
                 f"byte length must be width*height*3 = {expect}")
        _finite(self.stamp, "stamp")


@dataclass
class DetectionNotice:
    """One-shot object sighting: label, anchor-frame pose, camera snapshot."""

    agent: str
    object_label: str
    world_pose: FramedPose
    snapshot: CameraFrame

    def validate(self) -> None:
        _require(bool(self.agent), "agent", "must be non-empty")
        _require(bool(self.object_label), "object_label", "must be non-empty")
        self.world_pose.validate()
        self.snapshot.validate()


@dataclass
class GeoPose:
    """Geodetic fix: latitude/longitude in degrees plus compass heading."""

    lat_deg: float
    lon_deg: float
    heading_deg: float

    def validate(self) -> None:
        lat = _finite(self.lat_deg, "lat_deg")
        lon = _finite(self.lon_deg, "lon_deg")
        hdg = _finite(self.heading_deg, "heading_deg")
        _require(-90.0 <= lat <= 90.0, "lat_deg", "must be in [-90, 90]")
        _require(-180.0 <= lon <= 180.0, "lon_deg", "must be in [-180, 180]")
        _require(0.0 <= hdg < 360.0, "heading_deg", "must be in [0, 360)")


@dataclass
class AnchorRecord:
    """A shared reference frame all teammates localize against.

    `pose_in_world` is simulator ground truth and is never serialized:
    agents only ever see anchor-relative poses.  Non-root anchors carry
    their pose in a parent anchor frame instead.
    """

    id: str
    created_by: str
    geo: GeoPose | None = None
    parent: str | None = None
    pose_in_parent: FramedPose | None = None
    pose_in_world: FramedPose | None = None

    def validate(self) -> None:
        _require(bool(self.id), "id", "must be non-empty")
        _require(bool(self.created_by), "created_by", "must be non-empty")
        if self.geo is not None:
            self.geo.validate()
        if (self.parent is None) != (self.pose_in_parent is None):
            raise ValidationError("parent", "parent and pose_in_parent go together")
        if self.pose_in_parent is not None:
            self.pose_in_parent.validate()
            _require(self.pose_in_parent.frame == self.parent, "pose_in_parent.frame",
                     "must equal parent")


@dataclass
class AgentEvent:
    """Out-of-band notice from an agent: rejections, warnings, confirmations."""

    agent: str
    event: str
    detail: str = ""
    issuer: str = ""

    def validate(self) -> None:
        _require(bool(self.agent), "agent", "must be non-empty")
        _require(bool(self.event), "event", "must be non-empty")


@dataclass
class ModeRequest:
    """Ask an agent to switch control mode on behalf of an operator."""

    mode: str
    issuer: str
    owner: str = ""

    def validate(self) -> None:
        _require(self.mode in CONTROL_MODES, "mode", f"must be one of {CONTROL_MODES}")
        _require(bool(self.issuer), "issuer", "must be non-empty")
        if self.mode in ("teleoperation", "follow"):
            _require(bool(self.owner), "owner",
                     f"must be non-empty when mode={self.mode}")


@dataclass
class UiEvent:
    """One operator interaction (click, drag sample, typed command)."""

    event: str
    agent: str = ""
    data: dict = field(default_factory=dict)

    def validate(self) -> None:
        _require(bool(self.event), "event", "must be non-empty")
        _require(isinstance(self.data, dict), "data", "must be an object")


@dataclass
class ViewModel:
    """Per-UI-frame snapshot of one operator engine, for the console."""

    operator: str
    frame_seq: int
    data: dict = field(default_factory=dict)

    def validate(self) -> None:
        _require(bool(self.operator), "operator", "must be non-empty")
        _require(isinstance(self.frame_seq, int) and self.frame_seq >= 0,
                 "frame_seq", "must be an integer >= 0")
        _require(isinstance(self.data, dict), "data", "must be an object")


PAYLOAD_KINDS = {
    "agent_status": AgentStatus,
    "framed_pose": FramedPose,
    "twist": TwistCommand,
    "nav_path": NavPath,
    "goal_pose": FramedPose,
    "camera_frame": CameraFrame,
    "detection": DetectionNotice,
    "anchor_record": AnchorRecord,
    "agent_event": AgentEvent,
    "mode_request": ModeRequest,
    "ui_event": UiEvent,
    "view_model": ViewModel,
}


@dataclass
class Envelope:
    """The routed wire unit: topic, sender, sequence, stamp, payload."""

    topic: str
    sender: str
    seq: int
    stamp: float
    kind: str
    payload: object

    def validate(self) -> None:
        segments = topic_segments(self.topic)
        _require(len(segments) >= 2, "topic",
                 'must have >= 2 segments like "/<agent>/<channel>"')
        _require(all(segments), "topic", "segments must be non-empty")
        _require("*" not in segments, "topic", "wildcards belong in patterns only")
        _require(bool(self.sender), "sender", "must be non-empty")
        _require(isinstance(self.seq, int) and not isinstance(self.seq, bool)
                 and self.seq >= 0, "seq", "must be an integer >= 0")
        stamp = _finite(self.stamp, "stamp")
        _require(stamp >= 0.0, "stamp", "must be >= 0")
        _require(bool(self.kind), "kind", "must be non-empty")
        expected = PAYLOAD_KINDS.get(self.kind)
        if expected is None:
            _require(isinstance(self.payload, dict), "payload",
                     "unknown kinds carry an opaque JSON object")
        else:
            _require(isinstance(self.payload, expected), "payload",
                     f"kind {self.kind!r} requires {expected.__name__}")
            if self.kind == "anchor_record" and self.payload.pose_in_world is not None:
                raise ValidationError(
                    "payload.pose_in_world",
                    "world ground truth must not be sent on the wire")
            self.payload.validate()


def topic_segments(topic: str) -> list[str]:
    if not isinstance(topic, str) or not topic.startswith("/"):
        raise ValidationError("topic", 'must start with "/"')
    return topic[1:].split("/")


def topic_matches(pattern: str, topic: str) -> bool:
    """Segment-wise pattern match; "*" matches exactly one segment."""
    p = pattern[1:].split("/") if pattern.startswith("/") else None
    t = topic[1:].split("/") if topic.startswith("/") else None
    if p is None or t is None or len(p) != len(t):
        return False
    return all(ps == "*" or ps == ts for ps, ts in zip(p, t))


def valid_pattern(pattern: str) -> bool:
    if not isinstance(pattern, str) or not pattern.startswith("/"):
        return False
    segments = pattern[1:].split("/")
    return len(segments) >= 2 and all(segments)


def is_camera_topic(topic: str) -> bool:
    try:
        segments = topic_segments(topic)
    except ValidationError:
        return False
    return len(segments) >= 2 and segments[1] == "camera"


# --- dict <-> dataclass conversion -----------------------------------------

def _pose_to_obj(p: FramedPose) -> dict:
    return {"frame": p.frame, "x": p.x, "y": p.y, "yaw": p.yaw, "stamp": p.stamp}


def _pose_from_obj(obj, path: str) -> FramedPose:
    _expect_object(obj, path)
    try:
        return FramedPose(frame=_get(obj, path, "frame", str),
                          x=_get(obj, path, "x", (int, float)),
                          y=_get(obj, path, "y", (int, float)),
                          yaw=_get(obj, path, "yaw", (int, float)),
                          stamp=_get(obj, path, "stamp", (int, float)))
    except (TypeError, ValueError) as exc:
        raise DecodeError(path, str(exc))


def _get(obj: dict, path: str, key: str, types) -> object:
    if key not in obj:
        raise DecodeError(f"{path}.{key}", "missing field")
    value = obj[key]
    if types is not None and (not isinstance(value, types) or isinstance(value, bool)):
        raise DecodeError(f"{path}.{key}", f"expected {types}")
    return value


def _get_str(obj: dict, path: str, key: str) -> str:
    if key not in obj:
        raise DecodeError(f"{path}.{key}", "missing field")
    value = obj[key]
    if not isinstance(value, str):
        raise DecodeError(f"{path}.{key}", "expected string")
    return value


def _expect_object(obj, path: str) -> None:
    if not isinstance(obj, dict):
        raise DecodeError(path, "expected JSON object")


def payload_to_obj(kind: str, payload) -> dict:
    """Convert a payload to its canonical JSON object form."""
    if kind not in PAYLOAD_KINDS:
        return dict(payload)
    if kind in ("framed_pose", "goal_pose"):
        return _pose_to_obj(payload)
    if kind == "agent_status":
        return {"name": payload.name, "kind": payload.kind,
                "battery_pct": float(payload.battery_pct), "mode": payload.mode,
                "owner": payload.owner, "closest_anchor": payload.closest_anchor}
    if kind == "twist":
        return {"linear_mps": float(payload.linear_mps),
                "angular_rps": float(payload.angular_rps),
                "issuer": payload.issuer}
    if kind == "nav_path":
        return {"frame": payload.frame,
                "poses": [_pose_to_obj(p) for p in payload.poses],
                "issuer": payload.issuer}
    if kind == "camera_frame":
        return {"agent": payload.agent, "camera_index": payload.camera_index,
                "width": payload.width, "height": payload.height,
                "pixels_b64": base64.b64encode(payload.pixels).decode("ascii"),
                "stamp": float(payload.stamp)}
    if kind == "detection":
        return {"agent": payload.agent, "object_label": payload.object_label,
                "world_pose": _pose_to_obj(payload.world_pose),
                "snapshot": payload_to_obj("camera_frame", payload.snapshot)}
    if kind == "anchor_record":
        return {"id": payload.id, "created_by": payload.created_by,
                "geo": None if payload.geo is None else {
                    "lat_deg": float(payload.geo.lat_deg),
                    "lon_deg": float(payload.geo.lon_deg),
                    "heading_deg": float(payload.geo.heading_deg)},
                "parent": payload.parent,
                "pose_in_parent": None if payload.pose_in_parent is None
                else _pose_to_obj(payload.pose_in_parent)}
    if kind == "agent_event":
        return {"agent": payload.agent, "event": payload.event,
                "detail": payload.detail, "issuer": payload.issuer}
    if kind == "mode_request":
        return {"mode": payload.mode, "issuer": payload.issuer,
                "owner": payload.owner}
    if kind == "ui_event":
        return {"event": payload.event, "agent": payload.agent,
                "data": payload.data}
    if kind == "view_model":
        return {"operator": payload.operator, "frame_seq": payload.frame_seq,
                "data": payload.data}
    raise AssertionError(f"unhandled kind {kind}")


def payload_from_obj(kind: str, obj, path: str = "payload"):
    """Build a payload value from its JSON object form."""
    if kind not in PAYLOAD_KINDS:
        _expect_object(obj, path)
        return obj
    _expect_object(obj, path)
    if kind in ("framed_pose", "goal_pose"):
        return _pose_from_obj(obj, path)
    if kind == "agent_status":
        return AgentStatus(name=_get_str(obj, path, "name"),
                           kind=_get_str(obj, path, "kind"),
                           battery_pct=_get(obj, path, "battery_pct", (int, float)),
                           mode=_get_str(obj, path, "mode"),
                           owner=_get_str(obj, path, "owner"),
                           closest_anchor=_get_str(obj, path, "closest_anchor"))
    if kind == "twist":
        return TwistCommand(linear_mps=_get(obj, path, "linear_mps", (int, float)),
                            angular_rps=_get(obj, path, "angular_rps", (int, float)),
                            issuer=_get_str(obj, path, "issuer"))
    if kind == "nav_path":
        poses_obj = _get(obj, path, "poses", list)
        poses = [_pose_from_obj(p, f"{path}.poses[{i}]")
                 for i, p in enumerate(poses_obj)]
        return NavPath(frame=_get_str(obj, path, "frame"), poses=poses,
                       issuer=_get_str(obj, path, "issuer"))
    if kind == "camera_frame":
        raw = _get_str(obj, path, "pixels_b64")
        try:
            pixels = base64.b64decode(raw.encode("ascii"), validate=True)
        except Exception:
            raise DecodeError(f"{path}.pixels_b64", "invalid base64")
        return CameraFrame(agent=_get_str(obj, path, "agent"),
                           camera_index=_get(obj, path, "camera_index", int),
                           width=_get(obj, path, "width", int),
                           height=_get(obj, path, "height", int),
                           pixels=pixels,
                           stamp=_get(obj, path, "stamp", (int, float)))
    if kind == "detection":
        return DetectionNotice(
            agent=_get_str(obj, path, "agent"),
            object_label=_get_str(obj, path, "object_label"),
            world_pose=_pose_from_obj(_get(obj, path, "world_pose", dict),
                                      f"{path}.world_pose"),
            snapshot=payload_from_obj("camera_frame",
                                      _get(obj, path, "snapshot", dict),
                                      f"{path}.snapshot"))
    if kind == "anchor_record":
        geo_obj = obj.get("geo")
        geo = None
        if geo_obj is not None:
            _expect_object(geo_obj, f"{path}.geo")
            geo = GeoPose(lat_deg=_get(geo_obj, f"{path}.geo", "lat_deg", (int, float)),
                          lon_deg=_get(geo_obj, f"{path}.geo", "lon_deg", (int, float)),
                          heading_deg=_get(geo_obj, f"{path}.geo", "heading_deg",
                                           (int, float)))
        pose_obj = obj.get("pose_in_parent")
        pose = None if pose_obj is None else _pose_from_obj(
            pose_obj, f"{path}.pose_in_parent")
        parent = obj.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise DecodeError(f"{path}.parent", "expected string or null")
        return AnchorRecord(id=_get_str(obj, path, "id"),
                            created_by=_get_str(obj, path, "created_by"),
                            geo=geo, parent=parent, pose_in_parent=pose)
    if kind == "agent_event":
        return AgentEvent(agent=_get_str(obj, path, "agent"),
                          event=_get_str(obj, path, "event"),
                          detail=_get_str(obj, path, "detail"),
                          issuer=_get_str(obj, path, "issuer"))
    if kind == "mode_request":
        return ModeRequest(mode=_get_str(obj, path, "mode"),
                           issuer=_get_str(obj, path, "issuer"),
                           owner=_get_str(obj, path, "owner"))
    if kind == "ui_event":
        return UiEvent(event=_get_str(obj, path, "event"),
                       agent=_get_str(obj, path, "agent"),
                       data=_get(obj, path, "data", dict))
    if kind == "view_model":
        return ViewModel(operator=_get_str(obj, path, "operator"),
                         frame_seq=_get(obj, path, "frame_seq", int),
                         data=_get(obj, path, "data", dict))
    raise AssertionError(f"unhandled kind {kind}")


def envelope_to_obj(env: Envelope) -> dict:
    return {"topic": env.topic, "sender": env.sender, "seq": env.seq,
            "stamp": float(env.stamp), "kind": env.kind,
            "payload": payload_to_obj(env.kind, env.payload)}


def envelope_from_obj(obj) -> Envelope:
    _expect_object(obj, "envelope")
    kind = _get_str(obj, "envelope", "kind")
    env = Envelope(topic=_get_str(obj, "envelope", "topic"),
                   sender=_get_str(obj, "envelope", "sender"),
                   seq=_get(obj, "envelope", "seq", int),
                   stamp=_get(obj, "envelope", "stamp", (int, float)),
                   kind=kind,
                   payload=payload_from_obj(kind, _get(obj, "envelope",
                                                       "payload", dict)))
    env.validate()
    return env


# --- canonical bytes and framing --------------------------------------------

def canonical_json(obj) -> bytes:
    """Canonical JSON bytes: sorted keys, no whitespace, ASCII, finite only."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True, allow_nan=False).encode("ascii")


def encode_json(env: Envelope) -> bytes:
    """Canonical JSON bytes of one envelope, without framing."""
    env.validate()
    return canonical_json(envelope_to_obj(env))


def decode_json(data: bytes | str) -> Envelope:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FrameError(f"frame is not UTF-8: {exc}")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FrameError(f"frame is not JSON: {exc}")
    return envelope_from_obj(obj)


def frame_pack(body: bytes) -> bytes:
    return struct.pack(">I", len(body)) + body


def encode(env: Envelope) -> bytes:
    """Encode one envelope to its length-prefixed canonical wire frame."""
    return frame_pack(encode_json(env))


def decode(data: bytes) -> Envelope:
    """Decode exactly one length-prefixed frame into an envelope."""
    if len(data) < 4:
        raise FrameError("frame shorter than the 4-byte length prefix")
    (length,) = struct.unpack(">I", data[:4])
    if len(data) - 4 != length:
        raise FrameError(f"declared length {length}, got {len(data) - 4} bytes")
    return decode_json(data[4:])


class FrameReader:
    """Incremental splitter for a length-prefixed byte stream."""

    MAX_FRAME = 64 * 1024 * 1024

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[bytes]:
        """Absorb bytes; return the bodies of every completed frame."""
        self._buf.extend(data)
        frames = []
        while len(self._buf) >= 4:
            (length,) = struct.unpack(">I", bytes(self._buf[:4]))
            if length > self.MAX_FRAME:
                raise FrameError(f"frame length {length} exceeds limit")
            if len(self._buf) < 4 + length:
                break
            frames.append(bytes(self._buf[4:4 + length]))
            del self._buf[:4 + length]
        return frames


class SeqValidator:
    """Checks that seq strictly increases per (sender, topic) in a stream."""

    def __init__(self):
        self._last: dict[tuple[str, str], int] = {}

    def check(self, env: Envelope) -> None:
        key = (env.sender, env.topic)
        last = self._last.get(key)
        if last is not None and env.seq <= last:
            raise ValidationError(
                "seq", f"{env.seq} does not increase past {last} on {key}")
        self._last[key] = env.seq


# --- schema document ---------------------------------------------------------

_FIELD_NOTES = {
    "pixels": "raw RGB8 bytes, sent base64-encoded as pixels_b64",
    "pose_in_world": "simulator-only ground truth, never serialized",
}


def render_schema_doc() -> str:
    """Markdown description of the wire format, one table per message kind."""
    lines = [
        "# Wire schema",
        "",
        "Frames are `[4-byte big-endian length][UTF-8 JSON object]`. The JSON",
        "is canonical: sorted keys, no whitespace, ASCII escapes, finite numbers.",
        "Envelope fields: `topic`, `sender`, `seq`, `stamp`, `kind`, `payload`.",
        "",
        'Topics are `/<agent>/<channel>`; channels: status, tf, cmd_vel,',
        "nav_path, goal_pose, camera/<n>, detection, traj_past, traj_plan,",
        "mode, anchor, event, ui, view. Subscription patterns match segment-wise and",
        '`*` matches exactly one segment.',
        "",
    ]
    for kind in sorted(PAYLOAD_KINDS):
        cls = PAYLOAD_KINDS[kind]
        lines.append(f"## `{kind}` ({cls.__name__})")
        lines.append("")
        lines.append("| field | type | notes |")
        lines.append("|---|---|---|")
        for f in fields(cls):
            note = _FIELD_NOTES.get(f.name, "")
            ftype = str(f.type).replace("|", "or")
            lines.append(f"| {f.name} | `{ftype}` | {note} |")
        lines.append("")
    return "\n".join(lines)
