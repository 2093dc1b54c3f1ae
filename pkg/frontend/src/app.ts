/**
 * Console wiring: connect to the relay, render the view model, and turn
 * DOM interactions into ui_event envelopes. All command behavior lives
 * server-side in the operator engine.
 */

import { drawFrame } from "./camera.js";
import { JoystickPad } from "./joystick.js";
import { MapRenderer } from "./map.js";
import { EnvelopeObj } from "./protocol.js";
import { ConsoleState } from "./state.js";
import { UiEventPublisher } from "./uievents.js";
import { RelayClient } from "./wire.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function beep(freq: number): void {
  try {
    const ctx = new AudioContext();
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.frequency.value = freq;
    gain.gain.value = 0.05;
    osc.connect(gain).connect(ctx.destination);
    osc.start();
    osc.stop(ctx.currentTime + 0.12);
    osc.onended = () => ctx.close();
  } catch {
    /* audio is best-effort */
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const operator =
    params.get("operator") || window.prompt("operator name?", "supervisor") ||
    "supervisor";
  el<HTMLSpanElement>("operator-name").textContent = operator;

  let wsPort = 7602;
  try {
    const cfg = await (await fetch("/config.json")).json();
    wsPort = cfg.ws_port ?? wsPort;
  } catch {
    /* served statically without the mission process; use the default */
  }

  const state = new ConsoleState(operator);
  let selected: string | null = null;

  const banner = el<HTMLDivElement>("banner");
  const client = new RelayClient(
    `${operator}.console`,
    `ws://${window.location.hostname}:${wsPort}`,
    [`/${operator}/view`, "/*/camera/*"],
    {
      onDeliver: (env: EnvelopeObj) => state.ingest(env),
      onStatus: (ok, detail) => {
        state.setConnection(ok, detail);
        banner.textContent = ok ? "" : `relay: ${detail} — reconnecting…`;
        banner.style.display = ok ? "none" : "block";
      },
    },
  );
  client.connect();

  const ui = new UiEventPublisher(
    operator,
    (env) => client.publish(env),
    () => state.view?.t ?? 0,
  );

  const map = new MapRenderer(el<HTMLCanvasElement>("map"));
  const mapCanvas = el<HTMLCanvasElement>("map");
  mapCanvas.addEventListener("click", (e) => {
    const rect = mapCanvas.getBoundingClientRect();
    if (!state.view) return;
    const hit = map.agentAt(state.view, e.clientX - rect.left, e.clientY - rect.top);
    if (hit) {
      if (selected && selected !== hit) ui.closeLabel(selected);
      selected = hit;
      ui.openLabel(hit);
    }
  });
  mapCanvas.addEventListener("mousemove", (e) => {
    const rect = mapCanvas.getBoundingClientRect();
    if (!state.view) return;
    el<HTMLSpanElement>("geo-readout").textContent = map.geoReadout(
      state.view,
      e.clientX - rect.left,
      e.clientY - rect.top,
    );
  });

  // joystick pad: stream offsets only while we hold the grant
  const pad = new JoystickPad(el<HTMLDivElement>("joystick"), 70, {
    onOffset: (o) => {
      const teleop = state.view?.teleop;
      if (teleop?.engaged) ui.joystick(teleop.agent, o.dx, o.dy, o.dyaw);
    },
    onRelease: () => {
      const teleop = state.view?.teleop;
      if (teleop) ui.joystickRelease(teleop.agent);
    },
  });

  const actions: [string, () => void][] = [
    ["btn-control", () => selected && ui.beginTeleop(selected)],
    ["btn-release", () => selected && ui.endTeleop(selected)],
    ["btn-live", () => selected && ui.openLiveView(selected, 0)],
    [
      "btn-live-cycle",
      () => {
        const lv = state.view?.live_view;
        if (!lv) return;
        // cycle through the camera indices seen streaming for this agent
        const indices = [...state.cameras.keys()]
          .filter((k) => k.startsWith(`${lv.agent}/`))
          .map((k) => Number(k.split("/")[1]))
          .sort((a, b) => a - b);
        if (indices.length === 0) return;
        const next = indices[(indices.indexOf(lv.camera) + 1) % indices.length];
        ui.openLiveView(lv.agent, next);
      },
    ],
    ["btn-live-close", () => selected && ui.closeLiveView(selected)],
    ["btn-follow", () => selected && ui.followMe(selected)],
    ["btn-stop", () => selected && ui.stop(selected)],
    ["btn-wp-open", () => selected && ui.waypointOpen(selected)],
    ["btn-wp-nearer", () => ui.waypointAdjust(-1)],
    ["btn-wp-farther", () => ui.waypointAdjust(1)],
    ["btn-wp-lock", () => ui.waypointLock()],
    ["btn-wp-unlock", () => ui.waypointUnlock()],
    ["btn-wp-add", () => ui.waypointAdd()],
    ["btn-wp-send", () => ui.waypointSend()],
    ["btn-wp-cancel", () => ui.waypointCancel()],
  ];
  for (const [id, handler] of actions) {
    el<HTMLButtonElement>(id).addEventListener("click", handler);
  }

  const cameraCanvas = el<HTMLCanvasElement>("camera");
  const knob = el<HTMLDivElement>("joystick-knob");
  const detectionLog = el<HTMLUListElement>("detections");
  const confirmLog = el<HTMLUListElement>("confirmations");
  const seenDetections = new Set<string>();

  function renderPanel(): void {
    const view = state.view;
    const panel = el<HTMLDivElement>("agent-panel");
    if (!view || !selected) {
      panel.innerHTML = "<em>click an agent on the map</em>";
      return;
    }
    const agent = view.agents.find((a) => a.name === selected);
    if (!agent) {
      panel.innerHTML = `<em>${selected}: no status yet</em>`;
      return;
    }
    if (agent.kind === "HMD_USER") {
      // human teammates expose their name only
      panel.innerHTML = `<h3>${agent.name}</h3><div>teammate (HMD user)</div>`;
      return;
    }
    const rows = [
      ["battery", `${agent.battery_pct.toFixed(1)}%`],
      ["status", agent.mode],
      ["owner", agent.owner || "—"],
      ["distance", agent.distance === null ? "—" : `${agent.distance.toFixed(1)} m`],
      ["anchor", agent.closest_anchor || "—"],
    ];
    panel.innerHTML =
      `<h3 class="${agent.label?.color === "controlled_red" ? "red" : ""}">` +
      `${agent.name}</h3>` +
      rows.map(([k, v]) => `<div><span>${k}</span><b>${v}</b></div>`).join("");
  }

  function renderFrame(): void {
    const view = state.view;
    if (view) {
      map.draw(view, selected);
      renderPanel();
      // teleop pad styling + knob position
      const teleop = view.teleop;
      el<HTMLDivElement>("joystick").classList.toggle(
        "engaged",
        !!teleop?.engaged,
      );
      knob.style.transform = `translate(${pad.knob.x}px, ${pad.knob.y}px)`;
      if (teleop && !teleop.engaged && pad.grabbed) {
        pad.revoke(); // grant revoked mid-drag
      }
      const frame = state.liveCamera();
      cameraCanvas.style.display = frame ? "block" : "none";
      if (frame) drawFrame(cameraCanvas, frame);
      // detections and confirmations
      for (const d of view.detections) {
        const key = `${d.agent}|${d.label}|${d.stamp}`;
        if (!seenDetections.has(key)) {
          seenDetections.add(key);
          const item = document.createElement("li");
          item.textContent =
            `${d.agent} spotted ${d.label} at (${d.x.toFixed(0)}, ` +
            `${d.y.toFixed(0)})  t=${d.stamp.toFixed(1)}s`;
          detectionLog.prepend(item);
          beep(880);
        }
      }
      for (const c of state.freshConfirmations) {
        const item = document.createElement("li");
        item.textContent = `${c.t.toFixed(1)}s ${c.event} ${c.agent} ${c.detail}`;
        confirmLog.prepend(item);
        while (confirmLog.children.length > 12) {
          confirmLog.lastChild?.remove();
        }
        if (c.event === "path_sent" || c.event === "follow_confirmed") beep(660);
        if (c.event.endsWith("_rejected")) beep(220);
      }
      state.freshConfirmations = [];
      const wp = view.draft;
      el<HTMLSpanElement>("wp-distance").textContent = wp
        ? `${wp.cursor_distance.toFixed(0)} m ${wp.locked ? "(locked)" : ""}`
        : "—";
      el<HTMLSpanElement>("sim-time").textContent = `${view.t.toFixed(1)} s`;
    }
    window.requestAnimationFrame(renderFrame);
  }
  window.requestAnimationFrame(renderFrame);
}

boot().catch((err) => {
  document.body.innerHTML = `<pre>console failed to start: ${err}</pre>`;
});
