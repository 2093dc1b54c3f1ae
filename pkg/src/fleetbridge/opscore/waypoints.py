"""Waypoint authoring: cursor placement, distance stepping, path building.

The cursor marker opens 5 m ahead of the user and, while unlocked, keeps
re-centering on the user's heading at the current distance.  Distance
moves in 5 m steps within [2, 500] m so waypoints can be pushed out to
100 m and beyond.  Adding a waypoint locks the cursor pose into the
marker list and spawns a fresh cursor at the same distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..frames import TransformTree, compose
from ..messages import FramedPose, NavPath

OPEN_DISTANCE_M = 5.0
DISTANCE_STEP_M = 5.0
DISTANCE_MIN_M = 2.0
DISTANCE_MAX_M = 500.0


@dataclass
class WaypointDraft:
    """In-progress path: ordered locked markers plus the movable cursor."""

    target_agent: str
    frame: str
    cursor: FramedPose
    cursor_distance: float = OPEN_DISTANCE_M
    locked: bool = False
    markers: list[FramedPose] = field(default_factory=list)


def cursor_pose(user_pose: FramedPose, distance: float) -> FramedPose:
    """Marker pose `distance` ahead of the user along the user's heading."""
    return FramedPose(frame=user_pose.frame,
                      x=user_pose.x + distance * math.cos(user_pose.yaw),
                      y=user_pose.y + distance * math.sin(user_pose.yaw),
                      yaw=user_pose.yaw,
                      stamp=user_pose.stamp)


def waypoint_open(user_pose: FramedPose, target_agent: str) -> WaypointDraft:
    return WaypointDraft(target_agent=target_agent,
                         frame=user_pose.frame,
                         cursor=cursor_pose(user_pose, OPEN_DISTANCE_M))


def waypoint_track(draft: WaypointDraft, user_pose: FramedPose) -> None:
    """Re-center an unlocked cursor on the user's current heading."""
    if not draft.locked:
        draft.cursor = cursor_pose(user_pose, draft.cursor_distance)


def waypoint_adjust(draft: WaypointDraft, steps: int,
                    user_pose: FramedPose | None = None) -> None:
    draft.cursor_distance = min(
        DISTANCE_MAX_M,
        max(DISTANCE_MIN_M, draft.cursor_distance + DISTANCE_STEP_M * steps))
    if user_pose is not None and not draft.locked:
        draft.cursor = cursor_pose(user_pose, draft.cursor_distance)


def waypoint_add(draft: WaypointDraft) -> None:
    """Lock the cursor in as the next marker; keep cursor distance."""
    draft.markers.append(draft.cursor)


def waypoint_path(draft: WaypointDraft, tree: TransformTree,
                  anchor_frame: str, issuer: str) -> NavPath:
    """Re-express the markers in the target's closest-anchor frame."""
    if not draft.markers:
        raise ValueError("draft has no markers")
    anchor_from_draft = tree.lookup(anchor_frame, draft.frame)
    poses = []
    for marker in draft.markers:
        p = compose(anchor_from_draft, marker)
        poses.append(FramedPose(frame=anchor_frame, x=p.x, y=p.y, yaw=p.yaw,
                                stamp=marker.stamp))
    return NavPath(frame=anchor_frame, poses=poses, issuer=issuer)
