/**
 * Operator UI events: the console's only outbound vocabulary.
 *
 * Every interaction becomes a `ui_event` envelope on /<operator>/ui;
 * the operator engine turns those into actual commands, so the console
 * itself contains no command logic.
 */

import { EnvelopeObj, Json, quantizeOffset } from "./protocol.js";

export class UiEventPublisher {
  private seq = 0;

  constructor(
    public operator: string,
    private send: (env: EnvelopeObj) => void,
    private clock: () => number,
  ) {}

  emit(event: string, agent = "", data: { [key: string]: Json } = {}): EnvelopeObj {
    this.seq += 1;
    const env: EnvelopeObj = {
      topic: `/${this.operator}/ui`,
      sender: `${this.operator}.console`,
      seq: this.seq,
      stamp: this.clock(),
      kind: "ui_event",
      payload: { event, agent, data },
    };
    this.send(env);
    return env;
  }

  beginTeleop(agent: string) { this.emit("begin_teleop", agent); }
  endTeleop(agent: string) { this.emit("end_teleop", agent); }
  joystick(agent: string, dx: number, dy: number, dyaw: number) {
    this.emit("joystick", agent, {
      dx: quantizeOffset(dx), dy: quantizeOffset(dy), dyaw: quantizeOffset(dyaw),
    });
  }
  joystickRelease(agent: string) { this.emit("joystick_release", agent); }
  openLiveView(agent: string, camera = 0) {
    this.emit("open_live_view", agent, { camera });
  }
  closeLiveView(agent: string) { this.emit("close_live_view", agent); }
  openLabel(agent: string) { this.emit("open_label", agent); }
  closeLabel(agent: string) { this.emit("close_label", agent); }
  waypointOpen(agent: string) { this.emit("waypoint_open", agent); }
  waypointLock() { this.emit("waypoint_lock"); }
  waypointUnlock() { this.emit("waypoint_unlock"); }
  waypointAdjust(steps: number) { this.emit("waypoint_adjust", "", { steps }); }
  waypointAdd() { this.emit("waypoint_add"); }
  waypointSend() { this.emit("waypoint_send"); }
  waypointCancel() { this.emit("waypoint_cancel"); }
  followMe(agent: string) { this.emit("follow_me", agent); }
  stop(agent: string) { this.emit("stop", agent); }
}

/** Joystick workspace: +/-0.15 m of sphere travel, +/-pi/2 of twist. */
export const JOY_XY_M = 0.15;
export const JOY_YAW_RAD = Math.PI / 2;

export interface SphereOffset {
  dx: number;
  dy: number;
  dyaw: number;
}

/**
 * Map a pointer drag (pixels from the pad center) onto sphere offsets:
 * dragging up pushes the sphere forward, dragging left twists it
 * counter-clockwise (turn left). The sideways component stays zero for
 * the non-holonomic ground vehicles this pad drives.
 */
export function dragToOffsets(
  dxPx: number,
  dyPx: number,
  radiusPx: number,
): SphereOffset {
  const nx = Math.max(-1, Math.min(1, dxPx / radiusPx));
  const ny = Math.max(-1, Math.min(1, dyPx / radiusPx));
  return { dx: -ny * JOY_XY_M, dy: 0, dyaw: -nx * JOY_YAW_RAD };
}
