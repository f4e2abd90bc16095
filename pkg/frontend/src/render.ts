// Canvas drawing for the cockpit. Everything here is pure geometry on a
// small structural subset of CanvasRenderingContext2D so tests can hand
// in a recording fake instead of a real canvas.

import type { CockpitStore } from "./store.js";
import type { Viewport } from "./viewport.js";

export interface Scene2D {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  fill(): void;
  stroke(): void;
}

export const COLORS = {
  background: "#10151b",
  workspace: "#2e3c4a",
  obstacle: "#d64545",
  margin: "#9ecfff",
  target: "#f2d230",
  targetDone: "#6b6433",
  robot: "#e8f4ff",
  trail: "#3f9fb0",
};

const TWO_PI = Math.PI * 2;

// Screen radius of the inflated keep-out circle drawn around an obstacle.
// This is the single composition the margin overlay uses, exported so a
// test can compare it against independently computed pixels.
export function marginRadiusPx(
  vp: Viewport,
  obstacleRadius: number,
  rRob: number,
  dMin: number,
  sigma: number,
): number {
  return vp.metersToPixels(obstacleRadius + rRob + dMin + sigma);
}

function disc(ctx: Scene2D, x: number, y: number, r: number, color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, TWO_PI);
  ctx.fill();
}

function ring(ctx: Scene2D, x: number, y: number, r: number, color: string, width: number): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, TWO_PI);
  ctx.stroke();
}

export function drawScene(ctx: Scene2D, vp: Viewport, store: CockpitStore): void {
  ctx.globalAlpha = 1;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, vp.width, vp.height);

  const task = store.task;
  if (!task) return;

  const lo = vp.worldToScreen({ x: task.workspace_lo[0], z: task.workspace_lo[2] });
  const hi = vp.worldToScreen({ x: task.workspace_hi[0], z: task.workspace_hi[2] });
  ctx.strokeStyle = COLORS.workspace;
  ctx.lineWidth = 1;
  ctx.strokeRect(lo.x, hi.y, hi.x - lo.x, lo.y - hi.y);

  const sigma = store.state ? store.state.sigma_k : 0;

  for (const ob of task.obstacles) {
    const c = vp.worldToScreen({ x: ob.center[0], z: ob.center[2] });
    disc(ctx, c.x, c.y, vp.metersToPixels(ob.radius), COLORS.obstacle);
    ring(ctx, c.x, c.y, marginRadiusPx(vp, ob.radius, task.r_rob, task.d_min, sigma), COLORS.margin, 1.5);
  }

  const remaining = store.state ? store.state.targets_remaining : task.targets.length;
  const firstPending = task.targets.length - remaining;
  task.targets.forEach((target, i) => {
    const c = vp.worldToScreen({ x: target[0], z: target[2] });
    disc(ctx, c.x, c.y, Math.max(vp.metersToPixels(0.08), 3), i < firstPending ? COLORS.targetDone : COLORS.target);
  });

  if (store.trail.length > 1) {
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 1;
    ctx.globalAlpha = 0.6;
    ctx.beginPath();
    const first = vp.worldToScreen(store.trail[0]);
    ctx.moveTo(first.x, first.y);
    for (let i = 1; i < store.trail.length; i++) {
      const p = vp.worldToScreen(store.trail[i]);
      ctx.lineTo(p.x, p.y);
    }
    ctx.stroke();
    ctx.globalAlpha = 1;
  }

  if (store.state) {
    const p = vp.worldToScreen({ x: store.state.pos[0], z: store.state.pos[2] });
    disc(ctx, p.x, p.y, Math.max(vp.metersToPixels(task.r_rob), 3), COLORS.robot);
  }

  if (store.isStale()) {
    // telemetry is old: dim the whole scene rather than freezing silently
    ctx.globalAlpha = 0.55;
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, vp.width, vp.height);
    ctx.globalAlpha = 1;
  }
}
