// Browser entry point: wires the canvas, HUD, inputs and socket together.
// Everything testable lives in the other modules; this file is just DOM
// plumbing and the two periodic loops (render on rAF, commands at 20 Hz).

import { createClient } from "./client.js";
import type { SocketLike } from "./client.js";
import type { DelayWire } from "./protocol.js";
import { createInputTracker } from "./input.js";
import { drawScene } from "./render.js";
import { createStore } from "./store.js";
import { createViewport } from "./viewport.js";

const COMMAND_PERIOD_MS = 50;
const FALLBACK_V_MAX = 0.87;

// Thin shim: the browser WebSocket fires handlers with event objects and a
// bound `this`, while the client only needs the minimal SocketLike shape.
function browserSocket(url: string): SocketLike {
  const raw = new WebSocket(url);
  const sock: SocketLike = {
    onopen: null,
    onclose: null,
    onerror: null,
    onmessage: null,
    send: (data) => raw.send(data),
    close: () => raw.close(),
  };
  raw.onopen = () => sock.onopen?.();
  raw.onclose = () => sock.onclose?.();
  raw.onerror = () => sock.onerror?.();
  raw.onmessage = (ev) => sock.onmessage?.({ data: ev.data });
  return sock;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in the page`);
  return node as T;
}

function fmt(v: number | null | undefined, digits = 3): string {
  if (v === null || v === undefined || !Number.isFinite(v)) return "--";
  return v.toFixed(digits);
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas context unavailable");

  const banner = el<HTMLDivElement>("link-lost");
  const hud = {
    sigma: el<HTMLSpanElement>("hud-sigma"),
    rtt: el<HTMLSpanElement>("hud-rtt"),
    minDist: el<HTMLSpanElement>("hud-min-dist"),
    solve: el<HTMLSpanElement>("hud-solve"),
    posY: el<HTMLSpanElement>("hud-pos-y"),
    targets: el<HTMLSpanElement>("hud-targets"),
    status: el<HTMLSpanElement>("hud-status"),
  };
  const urlInput = el<HTMLInputElement>("server-url");
  const connectBtn = el<HTMLButtonElement>("connect");
  const marginBox = el<HTMLInputElement>("margin-enabled");
  const delayKind = el<HTMLSelectElement>("delay-kind");
  const delayA = el<HTMLInputElement>("delay-a");
  const delayB = el<HTMLInputElement>("delay-b");
  const delayApply = el<HTMLButtonElement>("delay-apply");

  const store = createStore(() => performance.now() / 1000);
  const viewport = createViewport(canvas.width, canvas.height);
  const tracker = createInputTracker();

  let client = createClient(urlInput.value, store, browserSocket);

  connectBtn.addEventListener("click", () => {
    client.close();
    client = createClient(urlInput.value, store, browserSocket);
    client.connect();
  });

  window.addEventListener("keydown", (ev) => {
    if (ev.code.startsWith("Arrow")) ev.preventDefault();
    tracker.keyDown(ev.code);
  });
  window.addEventListener("keyup", (ev) => tracker.keyUp(ev.code));
  window.addEventListener("blur", () => tracker.clearKeys());

  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    const anchor = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    viewport.zoomAt(anchor, Math.exp(-ev.deltaY * 0.001));
  });

  let dragging = false;
  let lastDrag = { x: 0, y: 0 };
  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    lastDrag = { x: ev.clientX, y: ev.clientY };
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  window.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    viewport.panBy(ev.clientX - lastDrag.x, ev.clientY - lastDrag.y);
    lastDrag = { x: ev.clientX, y: ev.clientY };
  });

  marginBox.addEventListener("change", () => {
    client.sendConfig({ margin: marginBox.checked });
  });

  delayApply.addEventListener("click", () => {
    const a = Number(delayA.value);
    const b = Number(delayB.value);
    let delay: DelayWire;
    switch (delayKind.value) {
      case "none":
        delay = { kind: "none" };
        break;
      case "constant":
        delay = { kind: "constant", d_ms: a };
        break;
      case "gaussian":
        delay = { kind: "gaussian", mean_ms: a, std_ms: b };
        break;
      case "uniform":
        delay = { kind: "uniform", lo_ms: a, hi_ms: b };
        break;
      default:
        return;
    }
    client.sendConfig({ delay });
  });

  // fit the view once per task frame, not on every redraw
  let fittedTaskSeq = -1;
  function fitIfNewTask(): void {
    const task = store.task;
    if (task && task.seq !== fittedTaskSeq) {
      viewport.fitToWorkspace(
        { x: task.workspace_lo[0], z: task.workspace_lo[2] },
        { x: task.workspace_hi[0], z: task.workspace_hi[2] },
      );
      fittedTaskSeq = task.seq;
    }
  }

  function pollGamepad(): void {
    const pads = navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = Array.from(pads).find((p) => p && p.connected);
    tracker.setGamepadAxes(pad ? pad.axes : null);
  }

  setInterval(() => {
    // keep streaming even with no input held: an explicit zero is how
    // "stop" is commanded, and it keeps the server deadman fed
    const vMax = store.task ? store.task.v_max : FALLBACK_V_MAX;
    client.sendCommand(tracker.desiredVelocity(vMax));
  }, COMMAND_PERIOD_MS);

  function updateHud(): void {
    const s = store.state;
    const m = store.metrics;
    hud.sigma.textContent = s ? `${fmt(s.sigma_k)} m` : "--";
    hud.rtt.textContent = s ? `${fmt(s.rtt_mean_ms, 1)} ms` : "--";
    hud.minDist.textContent = s ? `${fmt(s.min_surf_dist)} m` : "--";
    hud.posY.textContent = s ? fmt(s.pos[1]) : "--";
    hud.targets.textContent = s ? String(s.targets_remaining) : "--";
    hud.solve.textContent = m ? `${fmt(m.solve_ms_p50, 1)} / ${fmt(m.solve_ms_p95, 1)} ms` : "--";
    if (store.busy) {
      hud.status.textContent = "server busy";
    } else if (!store.connected) {
      hud.status.textContent = "disconnected";
    } else {
      hud.status.textContent = store.lastError ? `error: ${store.lastError}` : "connected";
    }
  }

  function frame(): void {
    pollGamepad();
    fitIfNewTask();
    drawScene(ctx as unknown as import("./render.js").Scene2D, viewport, store);
    updateHud();
    banner.style.display = store.isStale() ? "block" : "none";
    requestAnimationFrame(frame);
  }

  client.connect();
  requestAnimationFrame(frame);
}

main();
