"""Interactive agent-label presentation rules.

Labels sit on the agent out to 3 m, shrink linearly to half size between
3 m and 4.5 m, then detach: beyond 4.5 m they render at a fixed 4.5 m
depth along the user-to-agent bearing, half scale.  Every label therefore
stays inside the 5 m built-in interaction envelope no matter how far the
agent actually is, which is what makes far and occluded agents clickable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..messages import AgentStatus, FramedPose

ATTACH_FULL_SCALE_M = 3.0
DETACH_DISTANCE_M = 4.5
DETACHED_SCALE = 0.5
INTERACTION_LIMIT_M = 5.0

COLOR_NORMAL = "normal"
COLOR_CONTROLLED = "controlled_red"


@dataclass
class LabelView:
    """Computed presentation state of one agent's label for one user."""

    agent: str
    attached: bool
    render_distance: float
    scale: float
    bearing: float
    color: str
    expanded: bool = False


def label_scale(distance: float) -> float:
    if distance <= ATTACH_FULL_SCALE_M:
        return 1.0
    if distance >= DETACH_DISTANCE_M:
        return DETACHED_SCALE
    span = DETACH_DISTANCE_M - ATTACH_FULL_SCALE_M
    return 1.0 - (1.0 - DETACHED_SCALE) * (distance - ATTACH_FULL_SCALE_M) / span


def render_distance(distance: float) -> float:
    return min(distance, DETACH_DISTANCE_M)


def label_view(user_pose: FramedPose, agent_pose: FramedPose,
               status: AgentStatus, expanded: bool = False) -> LabelView:
    """Presentation state for one agent as seen by one user.

    Both poses must be expressed in a common frame; the bearing is the
    direction of the user->agent straight line in that frame.
    """
    if user_pose.frame != agent_pose.frame:
        raise ValueError(
            f"poses in different frames: {user_pose.frame!r} vs "
            f"{agent_pose.frame!r}")
    dx = agent_pose.x - user_pose.x
    dy = agent_pose.y - user_pose.y
    d = math.hypot(dx, dy)
    return LabelView(
        agent=status.name,
        attached=d < DETACH_DISTANCE_M,
        render_distance=render_distance(d),
        scale=label_scale(d),
        bearing=math.atan2(dy, dx),
        color=COLOR_CONTROLLED if status.mode == "teleoperation"
        else COLOR_NORMAL,
        expanded=expanded,
    )


def can_interact(view: LabelView) -> bool:
    """Labels render inside the 5 m interaction envelope by construction;
    this gate exists to catch regressions and filter replayed clicks."""
    return view.render_distance < INTERACTION_LIMIT_M
