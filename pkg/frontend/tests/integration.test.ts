// End-to-end session against the real control service: spawn the Python
// server, fly a scripted head-on pursuit into the nearest obstacle over a
// lossy-feeling gaussian link, and check the safety story from the
// cockpit's side of the wire.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import net from "node:net";
import path from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";

import { commandFrame, parseServerFrame } from "../src/protocol.js";
import type { MetricsFrame, StateFrame, TaskFrame, Vec3 } from "../src/protocol.js";
import { COLORS, drawScene } from "../src/render.js";
import type { Scene2D } from "../src/render.js";
import { createStore } from "../src/store.js";
import { createViewport } from "../src/viewport.js";

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");
const PURSUIT_SECONDS = 12;
const PACE = 5; // sim seconds per wall second

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no listen address"));
      }
    });
  });
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function scale(v: Vec3, s: number): Vec3 {
  return [v[0] * s, v[1] * s, v[2] * s];
}

function norm(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

describe("live service session", () => {
  let proc: ChildProcess | null = null;
  let port = 0;
  let stderrBuf = "";

  beforeAll(async () => {
    port = await freePort();
    proc = spawn(
      "python3",
      [
        "-m",
        "teleshield.cli",
        "serve",
        "--host",
        "127.0.0.1",
        "--port",
        String(port),
        "--seed",
        "3",
        "--delay",
        "gaussian:50,20",
        "--margin",
        "on",
        "--pace",
        String(PACE),
      ],
      { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] },
    );
    proc.stderr?.on("data", (chunk) => {
      stderrBuf += String(chunk);
    });
  });

  afterAll(() => {
    proc?.kill("SIGTERM");
  });

  function connect(timeoutMs = 20_000): Promise<WebSocket> {
    return new Promise((resolve, reject) => {
      const deadline = Date.now() + timeoutMs;
      const attempt = () => {
        const sock = new WebSocket(`ws://127.0.0.1:${port}`);
        sock.once("open", () => resolve(sock));
        sock.once("error", () => {
          sock.close();
          if (Date.now() > deadline) {
            reject(new Error(`server unreachable on :${port}\n${stderrBuf}`));
          } else {
            setTimeout(attempt, 250);
          }
        });
      };
      attempt();
    });
  }

  it(
    "head-on pursuit over gaussian(50,20) never dips below d_min and never applies out-of-range input",
    async () => {
      const sock = await connect();

      let task: TaskFrame | null = null;
      let latest: StateFrame | null = null;
      let lastMetrics: MetricsFrame | null = null;
      const states: StateFrame[] = [];

      sock.on("message", (data) => {
        const frame = parseServerFrame(String(data));
        if (frame.type === "task") task = frame;
        else if (frame.type === "state") {
          latest = frame;
          states.push(frame);
        } else if (frame.type === "metrics") lastMetrics = frame;
      });

      const started = Date.now();
      while (!task && Date.now() - started < 15_000) await sleep(50);
      expect(task, `no task frame; server said:\n${stderrBuf}`).not.toBeNull();
      const theTask = task as unknown as TaskFrame;
      expect(theTask.obstacles.length).toBeGreaterThan(0);

      // fly straight at whichever obstacle is nearest right now, full
      // speed, with a deliberately out-of-range command every fifth frame
      let seq = 0;
      const pump = setInterval(() => {
        if (!latest) return;
        const pos = (latest as StateFrame).pos;
        let best: Vec3 | null = null;
        let bestDist = Infinity;
        for (const ob of theTask.obstacles) {
          const d = norm(sub(ob.center, pos));
          if (d < bestDist) {
            bestDist = d;
            best = ob.center;
          }
        }
        if (!best || bestDist < 1e-9) return;
        const dir = scale(sub(best, pos), 1 / bestDist);
        const u = seq % 5 === 4 ? scale(dir, theTask.v_max * 6) : scale(dir, theTask.v_max);
        sock.send(commandFrame(seq, u));
        seq += 1;
      }, 40);

      await sleep(PURSUIT_SECONDS * 1000);
      clearInterval(pump);
      await sleep(200); // drain in-flight frames
      sock.close();

      expect(states.length).toBeGreaterThan(150);
      expect(seq).toBeGreaterThan(100);

      // safety: the logged surface distance never crosses d_min
      let minSurf = Infinity;
      for (const s of states) {
        expect(s.min_surf_dist).not.toBeNull();
        const d = s.min_surf_dist as number;
        expect(d).toBeGreaterThanOrEqual(theTask.d_min - 1e-12);
        if (d < minSurf) minSurf = d;
      }
      // the pursuit must actually have pressed against the boundary,
      // otherwise the safety check above proves nothing
      expect(minSurf).toBeLessThan(0.6);

      // in-range: applied inputs obey the per-axis box and the speed cap
      // even though every fifth command asked for six times the limit
      for (const s of states) {
        for (const c of s.vel) {
          expect(Math.abs(c)).toBeLessThanOrEqual(theTask.u_b + 1e-9);
        }
        expect(norm(s.vel)).toBeLessThanOrEqual(theTask.v_max + 1e-9);
      }

      // the run-level metrics agree (they also cover ticks between frames)
      expect(lastMetrics).not.toBeNull();
      const metrics = lastMetrics as unknown as MetricsFrame;
      expect(metrics.collision).toBe(false);
      expect(metrics.dmin_violation).toBe(false);
      expect(metrics.dmin_violation_ticks).toBe(0);
      expect(metrics.min_surface_distance).not.toBeNull();
      expect(metrics.min_surface_distance as number).toBeGreaterThanOrEqual(theTask.d_min);

      // rendered margin circles: replay real frames through the viewport
      // at default zoom and compare every ring against the server's own
      // sigma composition, to within one pixel
      const sigmaState = [...states].reverse().find((s) => s.sigma_k > 0);
      expect(sigmaState).toBeDefined();

      const store = createStore(() => 0);
      store.setConnected(true);
      store.ingest(theTask);
      store.ingest(sigmaState as StateFrame);

      const vp = createViewport(960, 720);
      vp.fitToWorkspace(
        { x: theTask.workspace_lo[0], z: theTask.workspace_lo[2] },
        { x: theTask.workspace_hi[0], z: theTask.workspace_hi[2] },
      );

      const rings: number[] = [];
      let pending: number[] = [];
      const ctx = {
        fillStyle: "",
        strokeStyle: "",
        lineWidth: 1,
        globalAlpha: 1,
        fillRect() {},
        strokeRect() {},
        beginPath() {
          pending = [];
        },
        arc(_x: number, _y: number, r: number) {
          pending.push(r);
        },
        moveTo() {},
        lineTo() {},
        fill() {},
        stroke() {
          if (ctx.strokeStyle === COLORS.margin) rings.push(...pending);
        },
      };
      drawScene(ctx as unknown as Scene2D, vp, store);

      expect(rings).toHaveLength(theTask.obstacles.length);
      const sigma = (sigmaState as StateFrame).sigma_k;
      theTask.obstacles.forEach((ob, i) => {
        const meters = ob.radius + theTask.r_rob + theTask.d_min + sigma;
        expect(Math.abs(rings[i] - meters * vp.scale)).toBeLessThan(1);
      });
    },
    180_000,
  );
});
