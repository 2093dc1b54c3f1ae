from __future__ import annotations

import math
import random

import pytest

from fleetbridge.messages import AgentStatus, FramedPose
from fleetbridge.opscore import (
    can_interact,
    label_scale,
    label_view,
    render_distance,
)
from fleetbridge.opscore.labels import COLOR_CONTROLLED, COLOR_NORMAL, LabelView


def user_at(x=0.0, y=0.0, yaw=0.0):
    return FramedPose(frame="asa_0", x=x, y=y, yaw=yaw)


def agent_at(x, y):
    return FramedPose(frame="asa_0", x=x, y=y, yaw=0.0)


def idle_status(name="jackal"):
    return AgentStatus(name=name, kind="UGV", battery_pct=90.0, mode="idle")


# The declared law, pinned pointwise.
LAW_POINTS = {
    0.0: (1.0, 0.0, True),
    2.0: (1.0, 2.0, True),
    3.0: (1.0, 3.0, True),
    3.75: (0.75, 3.75, True),
    4.5: (0.5, 4.5, False),
    10.0: (0.5, 4.5, False),
    200.0: (0.5, 4.5, False),
}


@pytest.mark.parametrize("d,expected", LAW_POINTS.items())
def test_label_law_pointwise(d, expected):
    scale, render, attached = expected
    view = label_view(user_at(), agent_at(d, 0.0), idle_status())
    assert view.scale == scale
    assert view.render_distance == render
    assert view.attached == attached


def test_scale_monotone_and_continuous():
    rng = random.Random(21)
    distances = sorted(rng.uniform(0.0, 600.0) for _ in range(10_000))
    previous = 1.0
    for d in distances:
        s = label_scale(d)
        assert 0.5 <= s <= 1.0
        assert s <= previous + 1e-12
        previous = s
    # continuity at the knees
    assert label_scale(3.0 + 1e-9) == pytest.approx(1.0, abs=1e-8)
    assert label_scale(4.5 - 1e-9) == pytest.approx(0.5, abs=1e-8)


def test_render_distance_never_reaches_interaction_limit():
    rng = random.Random(22)
    for _ in range(10_000):
        d = rng.uniform(0.0, 5000.0)
        assert render_distance(d) < 5.0


def test_detached_label_keeps_bearing_for_nlos_agent():
    # Agent 200 m away behind a building: label renders detached at 4.5 m
    # along the straight user->agent line and stays interactable.
    view = label_view(user_at(), agent_at(120.0, 160.0), idle_status())
    assert not view.attached
    assert view.render_distance == 4.5
    assert view.scale == 0.5
    assert view.bearing == pytest.approx(math.atan2(160.0, 120.0))
    assert can_interact(view)


def test_can_interact_cases():
    near = label_view(user_at(), agent_at(2.0, 0.0), idle_status())
    assert can_interact(near)
    far = label_view(user_at(), agent_at(200.0, 0.0), idle_status())
    assert can_interact(far)
    regression = LabelView(agent="x", attached=False, render_distance=6.0,
                           scale=0.5, bearing=0.0, color=COLOR_NORMAL)
    assert not can_interact(regression)


def test_controlled_agent_is_red():
    status = idle_status()
    status.mode = "teleoperation"
    status.owner = "carol"
    view = label_view(user_at(), agent_at(2.0, 0.0), status)
    assert view.color == COLOR_CONTROLLED
    status.mode = "autonomous"
    view = label_view(user_at(), agent_at(2.0, 0.0), status)
    assert view.color == COLOR_NORMAL


def test_frames_must_match():
    other = FramedPose(frame="asa_1", x=1.0, y=0.0, yaw=0.0)
    with pytest.raises(ValueError):
        label_view(user_at(), other, idle_status())


def test_attached_render_distance_is_true_distance():
    rng = random.Random(23)
    for _ in range(200):
        d = rng.uniform(0.0, 4.49)
        view = label_view(user_at(), agent_at(d, 0.0), idle_status())
        assert view.attached
        assert view.render_distance == pytest.approx(d)
