from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fleetbridge import messages as msg
from fleetbridge.messages import (
    AgentEvent,
    AgentStatus,
    AnchorRecord,
    CameraFrame,
    DetectionNotice,
    Envelope,
    FramedPose,
    FrameError,
    FrameReader,
    GeoPose,
    ModeRequest,
    NavPath,
    SeqValidator,
    TwistCommand,
    UiEvent,
    ValidationError,
    ViewModel,
    decode,
    encode,
)

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


def status_env(seq=1, battery=88.0, mode="idle", owner=""):
    return Envelope(topic="/jackal/status", sender="jackal", seq=seq, stamp=1.5,
                    kind="agent_status",
                    payload=AgentStatus(name="jackal", kind="UGV",
                                        battery_pct=battery, mode=mode,
                                        owner=owner, closest_anchor="asa_0"))


def sample_envelopes():
    snapshot = CameraFrame(agent="husky", camera_index=0, width=2, height=2,
                           pixels=bytes(range(12)), stamp=3.0)
    return [
        status_env(),
        Envelope(topic="/husky/tf", sender="husky", seq=4, stamp=2.05,
                 kind="framed_pose",
                 payload=FramedPose(frame="asa_0", x=1.25, y=-3.5,
                                    yaw=0.75, stamp=2.05)),
        Envelope(topic="/husky/cmd_vel", sender="carol", seq=9, stamp=2.1,
                 kind="twist",
                 payload=TwistCommand(linear_mps=0.5, angular_rps=-0.25,
                                      issuer="carol")),
        Envelope(topic="/husky/nav_path", sender="carol", seq=2, stamp=2.2,
                 kind="nav_path",
                 payload=NavPath(frame="asa_1", issuer="carol", poses=[
                     FramedPose(frame="asa_1", x=1.0, y=0.0, yaw=0.0, stamp=2.2),
                     FramedPose(frame="asa_1", x=2.0, y=1.0, yaw=0.5, stamp=2.2),
                 ])),
        Envelope(topic="/husky/goal_pose", sender="carol", seq=7, stamp=2.3,
                 kind="goal_pose",
                 payload=FramedPose(frame="asa_1", x=-1.0, y=0.0, yaw=math.pi,
                                    stamp=2.3)),
        Envelope(topic="/husky/camera/0", sender="husky", seq=12, stamp=3.0,
                 kind="camera_frame", payload=snapshot),
        Envelope(topic="/husky/detection", sender="husky", seq=1, stamp=3.0,
                 kind="detection",
                 payload=DetectionNotice(agent="husky",
                                         object_label="blue_barrel",
                                         world_pose=FramedPose(frame="asa_0",
                                                               x=5.0, y=6.0,
                                                               yaw=0.0,
                                                               stamp=3.0),
                                         snapshot=snapshot)),
        Envelope(topic="/jackal/anchor", sender="jackal", seq=1, stamp=0.0,
                 kind="anchor_record",
                 payload=AnchorRecord(id="asa_1", created_by="jackal",
                                      geo=GeoPose(30.25, -97.75, 90.0),
                                      parent="asa_0",
                                      pose_in_parent=FramedPose(
                                          frame="asa_0", x=10.0, y=0.0,
                                          yaw=0.0, stamp=0.0))),
        Envelope(topic="/husky/mode", sender="carol", seq=3, stamp=4.0,
                 kind="mode_request",
                 payload=ModeRequest(mode="teleoperation", issuer="carol",
                                     owner="carol")),
        Envelope(topic="/husky/event", sender="husky", seq=2, stamp=4.05,
                 kind="agent_event",
                 payload=AgentEvent(agent="husky", event="command_ignored",
                                    detail="issuer is not the owner",
                                    issuer="dave")),
        Envelope(topic="/carol/ui", sender="carol.console", seq=5, stamp=4.1,
                 kind="ui_event",
                 payload=UiEvent(event="waypoint_adjust", agent="husky",
                                 data={"steps": 19})),
        Envelope(topic="/carol/view", sender="carol", seq=6, stamp=4.2,
                 kind="view_model",
                 payload=ViewModel(operator="carol", frame_seq=42,
                                   data={"labels": []})),
    ]


@pytest.mark.parametrize("env", sample_envelopes(),
                         ids=lambda e: f"{e.kind}:{e.topic}")
def test_round_trip_identity(env):
    assert decode(encode(env)) == env


def test_encoding_is_deterministic():
    env = status_env()
    assert encode(env) == encode(status_env())


def test_one_segment_topic_rejected():
    env = status_env()
    env.topic = "/status"
    with pytest.raises(ValidationError) as err:
        encode(env)
    assert err.value.field == "topic"


@pytest.mark.parametrize("mutate,field_name", [
    (lambda e: setattr(e.payload, "battery_pct", 140.0), "battery_pct"),
    (lambda e: setattr(e.payload, "mode", "warp"), "mode"),
    (lambda e: setattr(e, "seq", -1), "seq"),
    (lambda e: setattr(e, "stamp", float("nan")), "stamp"),
    (lambda e: setattr(e, "sender", ""), "sender"),
])
def test_validation_names_the_violated_field(mutate, field_name):
    env = status_env()
    mutate(env)
    with pytest.raises(ValidationError) as err:
        encode(env)
    assert err.value.field.endswith(field_name)


def test_teleoperation_requires_owner():
    env = status_env(mode="teleoperation", owner="")
    with pytest.raises(ValidationError):
        encode(env)
    encode(status_env(mode="teleoperation", owner="carol"))


def test_twist_wire_bound():
    env = Envelope(topic="/husky/cmd_vel", sender="carol", seq=1, stamp=0.0,
                   kind="twist",
                   payload=TwistCommand(linear_mps=6.0, angular_rps=0.0,
                                        issuer="carol"))
    with pytest.raises(ValidationError):
        encode(env)


def test_nav_path_frames_must_agree():
    env = Envelope(topic="/husky/nav_path", sender="carol", seq=1, stamp=0.0,
                   kind="nav_path",
                   payload=NavPath(frame="asa_0", issuer="carol", poses=[
                       FramedPose(frame="asa_1", x=0.0, y=0.0, yaw=0.0)]))
    with pytest.raises(ValidationError):
        encode(env)


def test_camera_pixel_length_checked():
    env = Envelope(topic="/husky/camera/0", sender="husky", seq=1, stamp=0.0,
                   kind="camera_frame",
                   payload=CameraFrame(agent="husky", camera_index=0, width=2,
                                       height=2, pixels=b"short"))
    with pytest.raises(ValidationError):
        encode(env)


def test_anchor_ground_truth_never_leaks():
    record = AnchorRecord(id="asa_0", created_by="jackal",
                          pose_in_world=FramedPose(frame="world", x=1.0,
                                                   y=2.0, yaw=0.0))
    env = Envelope(topic="/jackal/anchor", sender="jackal", seq=1, stamp=0.0,
                   kind="anchor_record", payload=record)
    with pytest.raises(ValidationError):
        encode(env)
    record.pose_in_world = None
    decoded = decode(encode(env))
    assert decoded.payload.pose_in_world is None


def test_truncated_frame_is_a_frame_error():
    data = encode(status_env())
    with pytest.raises(FrameError):
        decode(data[:-3])
    with pytest.raises(FrameError):
        decode(data[:2])


def test_schema_mismatch_reports_field_path():
    obj = msg.envelope_to_obj(status_env())
    del obj["payload"]["battery_pct"]
    data = msg.frame_pack(msg.canonical_json(obj))
    with pytest.raises(msg.DecodeError) as err:
        decode(data)
    assert "battery_pct" in err.value.path


def test_unknown_kind_is_opaque_and_lossless():
    obj = {"topic": "/husky/future", "sender": "husky", "seq": 1, "stamp": 0.5,
           "kind": "future_thing", "payload": {"zap": [1, 2, 3], "q": "x"}}
    data = msg.frame_pack(msg.canonical_json(obj))
    env = decode(data)
    assert env.kind == "future_thing"
    assert env.payload == {"zap": [1, 2, 3], "q": "x"}
    assert encode(env) == data


def test_frame_reader_reassembles_split_stream():
    encoded = [encode(e) for e in sample_envelopes()]
    stream = b"".join(encoded)
    reader = FrameReader()
    bodies = []
    for i in range(0, len(stream), 7):
        bodies.extend(reader.feed(stream[i:i + 7]))
    assert [msg.decode_json(b) for b in bodies] == sample_envelopes()


def test_seq_validator_flags_regression():
    v = SeqValidator()
    v.check(status_env(seq=1))
    v.check(status_env(seq=2))
    with pytest.raises(ValidationError):
        v.check(status_env(seq=2))
    # Other (sender, topic) streams are independent.
    other = status_env(seq=1)
    other.topic = "/jackal/tf"
    other.kind = "framed_pose"
    other.payload = FramedPose(frame="asa_0", x=0.0, y=0.0, yaw=0.0)
    v.check(other)


def _print_golden_hint(path, data):  # pragma: no cover
    print(f"golden fixture missing; would write {len(data)} bytes to {path}")


@pytest.mark.parametrize("env", sample_envelopes(),
                         ids=lambda e: f"{e.kind}")
def test_golden_fixtures_byte_exact(env):
    """Wire bytes are pinned; any codec change shows up as a diff here."""
    name = f"{env.kind}_{env.topic.strip('/').replace('/', '_')}.bin"
    path = GOLDEN_DIR / name
    data = encode(env)
    if not path.exists():
        GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        _print_golden_hint(path, data)
    assert path.read_bytes() == data
    assert decode(path.read_bytes()) == env


names = st.sampled_from(["jackal", "husky", "alice", "bob", "supervisor"])
finite_coord = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
stamps = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


def pose_strategy(frame=st.sampled_from(["asa_0", "asa_1", "world_x"])):
    return st.builds(FramedPose, frame=frame, x=finite_coord, y=finite_coord,
                     yaw=angles, stamp=stamps)


def envelope_strategy():
    status = st.builds(
        AgentStatus, name=names, kind=st.sampled_from(["UGV", "HMD_USER"]),
        battery_pct=st.floats(min_value=0, max_value=100, allow_nan=False),
        mode=st.just("idle"), owner=st.just(""),
        closest_anchor=st.sampled_from(["", "asa_0"]))
    twist = st.builds(
        TwistCommand,
        linear_mps=st.floats(min_value=-5, max_value=5, allow_nan=False),
        angular_rps=st.floats(min_value=-5, max_value=5, allow_nan=False),
        issuer=names)
    ui = st.builds(
        UiEvent, event=st.sampled_from(["stop", "follow_me", "waypoint_add"]),
        agent=names,
        data=st.dictionaries(st.sampled_from(["steps", "camera"]),
                             st.integers(0, 100), max_size=2))
    payload_kind = st.one_of(
        st.tuples(st.just("agent_status"), status),
        st.tuples(st.just("framed_pose"), pose_strategy()),
        st.tuples(st.just("twist"), twist),
        st.tuples(st.just("ui_event"), ui),
    )

    def build(sender, channel, seq, stamp, kind_payload):
        kind, payload = kind_payload
        return Envelope(topic=f"/{sender}/{channel}", sender=sender, seq=seq,
                        stamp=stamp, kind=kind, payload=payload)

    return st.builds(build, names, st.sampled_from(["status", "tf", "ui"]),
                     st.integers(0, 2 ** 31), stamps, payload_kind)


@settings(max_examples=200, deadline=None)
@given(envelope_strategy())
def test_property_round_trip(env):
    data = encode(env)
    again = decode(data)
    assert again == env
    assert encode(again) == data


def test_schema_doc_lists_every_kind():
    doc = msg.render_schema_doc()
    for kind in msg.PAYLOAD_KINDS:
        assert f"`{kind}`" in doc


def test_generated_schema_doc_is_committed():
    committed = Path(__file__).parent.parent / "docs" / "wire-schema.md"
    if not committed.exists():
        committed.parent.mkdir(parents=True, exist_ok=True)
        committed.write_text(msg.render_schema_doc())
    assert committed.read_text() == msg.render_schema_doc()
