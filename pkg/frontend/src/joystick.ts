/**
 * Virtual joystick pad: pointer drags inside a circular workspace become
 * sphere offsets, streamed while engaged; release snaps to center and
 * sends the zero command.
 */

import { SphereOffset, dragToOffsets } from "./uievents.js";

export interface JoystickCallbacks {
  onOffset: (offset: SphereOffset) => void;
  onRelease: () => void;
}

export class JoystickPad {
  grabbed = false;
  current: SphereOffset = { dx: 0, dy: 0, dyaw: 0 };
  knob: { x: number; y: number } = { x: 0, y: 0 }; // px from center

  constructor(
    private element: HTMLElement,
    private radiusPx: number,
    private callbacks: JoystickCallbacks,
  ) {
    element.addEventListener("pointerdown", (e) => this.down(e as MouseEvent));
    element.addEventListener("pointermove", (e) => this.move(e as MouseEvent));
    for (const type of ["pointerup", "pointerleave", "pointercancel"]) {
      element.addEventListener(type, () => this.up());
    }
  }

  private center(): { x: number; y: number } {
    const rect = this.element.getBoundingClientRect();
    return { x: rect.left + rect.width / 2, y: rect.top + rect.height / 2 };
  }

  private down(e: MouseEvent): void {
    this.grabbed = true;
    this.move(e);
  }

  private move(e: MouseEvent): void {
    if (!this.grabbed) return;
    const c = this.center();
    const dxPx = e.clientX - c.x;
    const dyPx = e.clientY - c.y;
    const r = Math.hypot(dxPx, dyPx);
    const clamp = r > this.radiusPx ? this.radiusPx / r : 1;
    this.knob = { x: dxPx * clamp, y: dyPx * clamp };
    this.current = dragToOffsets(dxPx, dyPx, this.radiusPx);
    this.callbacks.onOffset(this.current);
  }

  private up(): void {
    if (!this.grabbed) return;
    this.grabbed = false;
    this.knob = { x: 0, y: 0 };
    this.current = { dx: 0, dy: 0, dyaw: 0 };
    this.callbacks.onRelease();
  }

  /** Disable mid-drag (ownership revoked): snap home and send zero. */
  revoke(): void {
    this.up();
  }
}
