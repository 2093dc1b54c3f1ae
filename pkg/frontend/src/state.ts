/**
 * Console state, rebuilt purely from the relay stream.
 *
 * Everything drawn comes from the operator engine's view-model frames
 * plus raw camera envelopes, so a page refresh recovers the whole
 * picture within one view frame of reconnecting.
 */

import { EnvelopeObj } from "./protocol.js";

export interface AgentView {
  name: string;
  kind: string;
  battery_pct: number;
  mode: string;
  owner: string;
  closest_anchor: string;
  pose: { x: number; y: number; yaw: number } | null;
  distance: number | null;
  label: {
    attached: boolean;
    render_distance: number;
    scale: number;
    bearing: number;
    color: string;
    expanded: boolean;
    interactable: boolean;
  } | null;
  camera: { camera: number; stamp: number } | null;
}

export interface ViewData {
  t: number;
  root: string | null;
  user: { x: number; y: number; yaw: number } | null;
  agents: AgentView[];
  anchors: {
    id: string;
    geo: { lat_deg: number; lon_deg: number; heading_deg: number } | null;
    pose: { x: number; y: number; yaw: number } | null;
  }[];
  draft: {
    target_agent: string;
    locked: boolean;
    cursor_distance: number;
    cursor: { x: number; y: number; yaw: number };
    markers: { x: number; y: number; yaw: number }[];
  } | null;
  teleop: { agent: string; engaged: boolean } | null;
  follow: string[];
  live_view: { agent: string; camera: number } | null;
  detections: { agent: string; label: string; x: number; y: number; stamp: number }[];
  trajectories: { [agent: string]: { plan?: number[][]; past?: number[][] } };
  goal_markers: { [agent: string]: number[] };
  pending: { [agent: string]: string };
  confirmations: { t: number; event: string; agent: string; detail: string }[];
}

export interface CameraFrameData {
  agent: string;
  camera_index: number;
  width: number;
  height: number;
  pixels_b64: string;
  stamp: number;
}

export class ConsoleState {
  view: ViewData | null = null;
  viewFrameSeq = -1;
  cameras = new Map<string, CameraFrameData>();
  connected = false;
  connectionDetail = "connecting";
  lastConfirmationKey = "";
  freshConfirmations: ViewData["confirmations"] = [];

  constructor(public operator: string) {}

  ingest(env: EnvelopeObj): void {
    if (env.kind === "view_model" && env.topic === `/${this.operator}/view`) {
      const payload = env.payload as unknown as {
        frame_seq: number;
        data: ViewData;
      };
      if (payload.frame_seq <= this.viewFrameSeq) {
        return; // stale frame
      }
      this.viewFrameSeq = payload.frame_seq;
      this.collectConfirmations(payload.data);
      this.view = payload.data;
    } else if (env.kind === "camera_frame") {
      const frame = env.payload as unknown as CameraFrameData;
      this.cameras.set(`${frame.agent}/${frame.camera_index}`, frame);
    }
  }

  private collectConfirmations(next: ViewData): void {
    const fresh: ViewData["confirmations"] = [];
    for (const c of next.confirmations) {
      const key = `${c.t}|${c.event}|${c.agent}|${c.detail}`;
      if (key === this.lastConfirmationKey) {
        fresh.length = 0; // everything before and including the marker is old
        continue;
      }
      fresh.push(c);
    }
    if (next.confirmations.length > 0) {
      const last = next.confirmations[next.confirmations.length - 1];
      this.lastConfirmationKey = `${last.t}|${last.event}|${last.agent}|${last.detail}`;
    }
    this.freshConfirmations = this.view === null ? [] : fresh;
  }

  setConnection(connected: boolean, detail: string): void {
    this.connected = connected;
    this.connectionDetail = detail;
  }

  agent(name: string): AgentView | undefined {
    return this.view?.agents.find((a) => a.name === name);
  }

  liveCamera(): CameraFrameData | null {
    const lv = this.view?.live_view;
    if (!lv) return null;
    return this.cameras.get(`${lv.agent}/${lv.camera}`) ?? null;
  }
}
