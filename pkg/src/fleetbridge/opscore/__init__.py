from .engine import OperatorEngine, OwnershipLedger
from .joystick import joystick_to_twist
from .labels import LabelView, can_interact, label_scale, label_view, render_distance
from .waypoints import (
    WaypointDraft,
    cursor_pose,
    waypoint_add,
    waypoint_adjust,
    waypoint_open,
    waypoint_path,
    waypoint_track,
)

__all__ = [
    "OperatorEngine", "OwnershipLedger", "joystick_to_twist", "LabelView",
    "can_interact", "label_scale", "label_view", "render_distance",
    "WaypointDraft", "cursor_pose", "waypoint_add", "waypoint_adjust",
    "waypoint_open", "waypoint_path", "waypoint_track",
]
