"""Virtual joystick: sphere offsets to velocity commands.

The grabbed sphere moves inside a +/-0.15 m x/y workspace and twists
+/-pi/2 about z.  Offsets map proportionally onto the platform limits:
full forward deflection commands v_max, full twist commands omega_max.
Sideways offset is ignored for non-holonomic ground vehicles.
"""

from __future__ import annotations

import math

from ..messages import TwistCommand

WORKSPACE_XY_M = 0.15
WORKSPACE_YAW_RAD = math.pi / 2.0


def _clamp(v: float, lim: float) -> float:
    return max(-lim, min(lim, v))


def joystick_to_twist(offset: tuple[float, float, float],
                      limits: tuple[float, float],
                      issuer: str) -> TwistCommand:
    """Proportional rate command from a sphere offset (dx, dy, dyaw)."""
    dx, _dy, dyaw = offset
    v_max, omega_max = limits
    dx = _clamp(dx, WORKSPACE_XY_M)
    dyaw = _clamp(dyaw, WORKSPACE_YAW_RAD)
    return TwistCommand(
        linear_mps=_clamp(v_max * dx / WORKSPACE_XY_M, v_max),
        angular_rps=_clamp(omega_max * dyaw / WORKSPACE_YAW_RAD, omega_max),
        issuer=issuer)
