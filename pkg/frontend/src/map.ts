/**
 * Top-down map: agents, anchors, trajectories, waypoint draft, detections.
 * Pure draw-from-view-model; the only state here is the smoothed viewport.
 */

import { GeoAnchor, formatGeo, pointToGeo } from "./geo.js";
import { ViewData } from "./state.js";

const COLORS = {
  background: "#10151c",
  grid: "#1c2633",
  ugv: "#4da3ff",
  ugvControlled: "#ff4d4d",
  user: "#ffd24d",
  self: "#7dff9b",
  anchor: "#b48cff",
  plan: "#58d68d",
  past: "#6b7f93",
  draft: "#ff6b6b",
  detection: "#ff9d00",
  goal: "#58d6c9",
};

export interface Viewport {
  cx: number;
  cy: number;
  scale: number; // px per meter
}

export function computeViewport(
  view: ViewData,
  width: number,
  height: number,
): Viewport {
  const xs: number[] = [];
  const ys: number[] = [];
  const push = (x: number, y: number) => {
    xs.push(x);
    ys.push(y);
  };
  if (view.user) push(view.user.x, view.user.y);
  for (const a of view.agents) if (a.pose) push(a.pose.x, a.pose.y);
  for (const an of view.anchors) if (an.pose) push(an.pose.x, an.pose.y);
  for (const d of view.detections) push(d.x, d.y);
  if (view.draft) {
    push(view.draft.cursor.x, view.draft.cursor.y);
    for (const m of view.draft.markers) push(m.x, m.y);
  }
  for (const tracks of Object.values(view.trajectories)) {
    for (const pts of [tracks.plan, tracks.past]) {
      if (pts) for (const [x, y] of pts) push(x, y);
    }
  }
  if (xs.length === 0) push(0, 0);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = Math.max(maxX - minX, 40);
  const spanY = Math.max(maxY - minY, 40);
  const scale = 0.9 * Math.min(width / spanX, height / spanY);
  return { cx: (minX + maxX) / 2, cy: (minY + maxY) / 2, scale };
}

export class MapRenderer {
  viewport: Viewport = { cx: 0, cy: 0, scale: 4 };

  constructor(private canvas: HTMLCanvasElement) {}

  toScreen(x: number, y: number): [number, number] {
    const { cx, cy, scale } = this.viewport;
    return [
      this.canvas.width / 2 + (x - cx) * scale,
      this.canvas.height / 2 - (y - cy) * scale, // map +y is up
    ];
  }

  toWorld(px: number, py: number): [number, number] {
    const { cx, cy, scale } = this.viewport;
    return [
      cx + (px - this.canvas.width / 2) / scale,
      cy - (py - this.canvas.height / 2) / scale,
    ];
  }

  /** Name of the agent whose marker covers the pixel, if any. */
  agentAt(view: ViewData, px: number, py: number): string | null {
    for (const a of view.agents) {
      if (!a.pose) continue;
      const [ax, ay] = this.toScreen(a.pose.x, a.pose.y);
      if ((ax - px) ** 2 + (ay - py) ** 2 <= 14 ** 2) {
        return a.name;
      }
    }
    return null;
  }

  geoAnchor(view: ViewData): GeoAnchor | null {
    for (const a of view.anchors) {
      if (a.geo && a.pose) return { pose: a.pose, geo: a.geo };
    }
    return null;
  }

  geoReadout(view: ViewData, px: number, py: number): string {
    const anchor = this.geoAnchor(view);
    const [x, y] = this.toWorld(px, py);
    if (!anchor) return `${x.toFixed(1)}, ${y.toFixed(1)} m`;
    return formatGeo(pointToGeo(anchor, x, y));
  }

  draw(view: ViewData, selected: string | null): void {
    const target = computeViewport(view, this.canvas.width, this.canvas.height);
    const vp = this.viewport;
    vp.cx += (target.cx - vp.cx) * 0.2;
    vp.cy += (target.cy - vp.cy) * 0.2;
    vp.scale += (target.scale - vp.scale) * 0.2;

    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, width, height);
    this.drawGrid(ctx);
    this.drawTrajectories(ctx, view);
    this.drawDraft(ctx, view);
    this.drawGoals(ctx, view);
    for (const anchor of view.anchors) {
      if (anchor.pose) this.drawAnchor(ctx, anchor.pose, anchor.id, !!anchor.geo);
    }
    for (const d of view.detections) this.drawDetection(ctx, d);
    for (const agent of view.agents) this.drawAgent(ctx, agent, selected);
    if (view.user) this.drawUser(ctx, view.user);
  }

  private drawGrid(ctx: CanvasRenderingContext2D): void {
    const step = this.viewport.scale * 20; // 20 m grid
    ctx.strokeStyle = COLORS.grid;
    ctx.lineWidth = 1;
    const [ox, oy] = this.toScreen(
      Math.floor(this.viewport.cx / 20) * 20,
      Math.floor(this.viewport.cy / 20) * 20,
    );
    for (let x = ox % step; x < this.canvas.width; x += step) {
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, this.canvas.height);
      ctx.stroke();
    }
    for (let y = oy % step; y < this.canvas.height; y += step) {
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(this.canvas.width, y);
      ctx.stroke();
    }
  }

  private polyline(ctx: CanvasRenderingContext2D, pts: number[][]): void {
    ctx.beginPath();
    pts.forEach(([x, y], i) => {
      const [px, py] = this.toScreen(x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  private drawTrajectories(ctx: CanvasRenderingContext2D, view: ViewData): void {
    for (const tracks of Object.values(view.trajectories)) {
      if (tracks.past && tracks.past.length > 1) {
        ctx.strokeStyle = COLORS.past;
        ctx.lineWidth = 1.5;
        ctx.setLineDash([]);
        this.polyline(ctx, tracks.past);
      }
      if (tracks.plan && tracks.plan.length > 1) {
        ctx.strokeStyle = COLORS.plan;
        ctx.lineWidth = 2;
        ctx.setLineDash([6, 4]);
        this.polyline(ctx, tracks.plan);
        ctx.setLineDash([]);
      }
    }
  }

  private drawDraft(ctx: CanvasRenderingContext2D, view: ViewData): void {
    const draft = view.draft;
    if (!draft) return;
    ctx.strokeStyle = COLORS.draft;
    ctx.fillStyle = COLORS.draft;
    ctx.lineWidth = 2;
    if (draft.markers.length > 0) {
      ctx.setLineDash([4, 4]);
      this.polyline(
        ctx,
        draft.markers.map((m) => [m.x, m.y]).concat([[draft.cursor.x, draft.cursor.y]]),
      );
      ctx.setLineDash([]);
    }
    for (const m of draft.markers) {
      const [px, py] = this.toScreen(m.x, m.y);
      ctx.beginPath();
      ctx.arc(px, py, 5, 0, Math.PI * 2);
      ctx.fill();
    }
    const [cx, cy] = this.toScreen(draft.cursor.x, draft.cursor.y);
    ctx.beginPath();
    ctx.arc(cx, cy, 8, 0, Math.PI * 2);
    ctx.stroke();
    if (!draft.locked) {
      ctx.beginPath();
      ctx.arc(cx, cy, 11, 0, Math.PI * 2);
      ctx.setLineDash([2, 3]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  private drawGoals(ctx: CanvasRenderingContext2D, view: ViewData): void {
    ctx.strokeStyle = COLORS.goal;
    for (const [x, y] of Object.values(view.goal_markers)) {
      const [px, py] = this.toScreen(x, y);
      ctx.beginPath();
      ctx.moveTo(px - 5, py);
      ctx.lineTo(px + 5, py);
      ctx.moveTo(px, py - 5);
      ctx.lineTo(px, py + 5);
      ctx.stroke();
    }
  }

  private drawAnchor(
    ctx: CanvasRenderingContext2D,
    pose: { x: number; y: number },
    id: string,
    hasGeo: boolean,
  ): void {
    const [px, py] = this.toScreen(pose.x, pose.y);
    ctx.strokeStyle = COLORS.anchor;
    ctx.beginPath();
    ctx.moveTo(px, py - 6);
    ctx.lineTo(px + 6, py);
    ctx.lineTo(px, py + 6);
    ctx.lineTo(px - 6, py);
    ctx.closePath();
    ctx.stroke();
    ctx.fillStyle = COLORS.anchor;
    ctx.font = "10px sans-serif";
    ctx.fillText(hasGeo ? `${id} (geo)` : id, px + 8, py - 6);
  }

  private drawDetection(
    ctx: CanvasRenderingContext2D,
    d: { x: number; y: number; label: string },
  ): void {
    const [px, py] = this.toScreen(d.x, d.y);
    ctx.strokeStyle = COLORS.detection;
    ctx.fillStyle = COLORS.detection;
    ctx.beginPath();
    for (let i = 0; i < 5; i++) {
      const a = -Math.PI / 2 + (i * 4 * Math.PI) / 5;
      const [sx, sy] = [px + 8 * Math.cos(a), py + 8 * Math.sin(a)];
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    }
    ctx.closePath();
    ctx.stroke();
    ctx.font = "10px sans-serif";
    ctx.fillText(d.label, px + 10, py + 4);
  }

  private drawAgent(
    ctx: CanvasRenderingContext2D,
    agent: ViewData["agents"][number],
    selected: string | null,
  ): void {
    if (!agent.pose) return;
    const [px, py] = this.toScreen(agent.pose.x, agent.pose.y);
    const controlled = agent.label?.color === "controlled_red";
    const color = controlled
      ? COLORS.ugvControlled
      : agent.kind === "UGV"
        ? COLORS.ugv
        : COLORS.user;
    ctx.fillStyle = color;
    ctx.strokeStyle = color;
    ctx.beginPath();
    if (agent.kind === "UGV") {
      ctx.arc(px, py, 7, 0, Math.PI * 2);
      ctx.fill();
    } else {
      ctx.moveTo(px, py - 8);
      ctx.lineTo(px + 7, py + 6);
      ctx.lineTo(px - 7, py + 6);
      ctx.closePath();
      ctx.fill();
    }
    // heading tick
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(
      px + 13 * Math.cos(-agent.pose.yaw),
      py + 13 * Math.sin(-agent.pose.yaw),
    );
    ctx.stroke();
    if (selected === agent.name) {
      ctx.beginPath();
      ctx.arc(px, py, 11, 0, Math.PI * 2);
      ctx.stroke();
    }
    ctx.font = "11px sans-serif";
    ctx.fillText(agent.name, px + 10, py - 8);
  }

  private drawUser(
    ctx: CanvasRenderingContext2D,
    user: { x: number; y: number; yaw: number },
  ): void {
    const [px, py] = this.toScreen(user.x, user.y);
    ctx.fillStyle = COLORS.self;
    ctx.strokeStyle = COLORS.self;
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, Math.PI * 2);
    ctx.fill();
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + 12 * Math.cos(-user.yaw), py + 12 * Math.sin(-user.yaw));
    ctx.stroke();
    ctx.font = "11px sans-serif";
    ctx.fillText("you", px + 8, py + 12);
  }
}
