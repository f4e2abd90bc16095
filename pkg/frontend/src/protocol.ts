// Wire protocol for the teleoperation service: JSON text frames, one
// object per frame. Parsing is strict so a malformed server is caught at
// the boundary instead of as NaN geometry three modules later.

export type Vec3 = [number, number, number];

export interface ObstacleSpec {
  center: Vec3;
  radius: number;
}

export interface StateFrame {
  type: "state";
  seq: number;
  t: number;
  pos: Vec3;
  vel: Vec3;
  sigma_k: number;
  rtt_mean_ms: number;
  min_surf_dist: number | null;
  targets_remaining: number;
}

export interface TaskFrame {
  type: "task";
  seq: number;
  t: number;
  workspace_lo: Vec3;
  workspace_hi: Vec3;
  start: Vec3;
  obstacles: ObstacleSpec[];
  targets: Vec3[];
  r_rob: number;
  d_min: number;
  v_max: number;
  u_b: number;
}

export interface MetricsFrame {
  type: "metrics";
  seq: number;
  t: number;
  targets_reached: number;
  targets_total: number;
  task_done: boolean;
  collision: boolean;
  dmin_violation: boolean;
  dmin_violation_ticks: number;
  min_surface_distance: number | null;
  solve_ms_p50: number;
  solve_ms_p95: number;
  rtt_mean_ms: number;
  rtt_std_ms: number;
  rtt_count: number;
  sigma_k: number;
  margin: boolean;
  delay: DelayWire;
}

export interface BusyFrame {
  type: "busy";
  seq: number;
  t: number;
  message: string;
}

export interface ErrorFrame {
  type: "error";
  seq: number;
  t: number;
  message: string;
}

export type ServerFrame =
  | StateFrame
  | TaskFrame
  | MetricsFrame
  | BusyFrame
  | ErrorFrame;

export type DelayWire =
  | { kind: "none" }
  | { kind: "constant"; d_ms: number }
  | { kind: "gaussian"; mean_ms: number; std_ms: number }
  | { kind: "uniform"; lo_ms: number; hi_ms: number };

function fail(why: string): never {
  throw new Error(`bad frame: ${why}`);
}

function num(v: unknown, name: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) fail(`${name} must be a finite number`);
  return v;
}

function numOrNull(v: unknown, name: string): number | null {
  if (v === null) return null;
  return num(v, name);
}

function bool(v: unknown, name: string): boolean {
  if (typeof v !== "boolean") fail(`${name} must be a boolean`);
  return v;
}

function str(v: unknown, name: string): string {
  if (typeof v !== "string") fail(`${name} must be a string`);
  return v;
}

function vec3(v: unknown, name: string): Vec3 {
  if (!Array.isArray(v) || v.length !== 3) fail(`${name} must be [x, y, z]`);
  return [num(v[0], name), num(v[1], name), num(v[2], name)];
}

function obstacle(v: unknown, name: string): ObstacleSpec {
  if (typeof v !== "object" || v === null) fail(`${name} must be an object`);
  const o = v as Record<string, unknown>;
  return { center: vec3(o.center, `${name}.center`), radius: num(o.radius, `${name}.radius`) };
}

function delayWire(v: unknown): DelayWire {
  if (typeof v !== "object" || v === null) fail("delay must be an object");
  const d = v as Record<string, unknown>;
  switch (d.kind) {
    case "none":
      return { kind: "none" };
    case "constant":
      return { kind: "constant", d_ms: num(d.d_ms, "d_ms") };
    case "gaussian":
      return { kind: "gaussian", mean_ms: num(d.mean_ms, "mean_ms"), std_ms: num(d.std_ms, "std_ms") };
    case "uniform":
      return { kind: "uniform", lo_ms: num(d.lo_ms, "lo_ms"), hi_ms: num(d.hi_ms, "hi_ms") };
    default:
      fail(`unknown delay kind ${String(d.kind)}`);
  }
}

export function parseServerFrame(raw: string): ServerFrame {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    fail("not valid JSON");
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    fail("frame must be a JSON object");
  }
  const m = data as Record<string, unknown>;
  const seq = num(m.seq, "seq");
  const t = num(m.t, "t");
  switch (m.type) {
    case "state":
      return {
        type: "state",
        seq,
        t,
        pos: vec3(m.pos, "pos"),
        vel: vec3(m.vel, "vel"),
        sigma_k: num(m.sigma_k, "sigma_k"),
        rtt_mean_ms: num(m.rtt_mean_ms, "rtt_mean_ms"),
        min_surf_dist: numOrNull(m.min_surf_dist, "min_surf_dist"),
        targets_remaining: num(m.targets_remaining, "targets_remaining"),
      };
    case "task": {
      if (!Array.isArray(m.obstacles)) fail("obstacles must be a list");
      if (!Array.isArray(m.targets)) fail("targets must be a list");
      return {
        type: "task",
        seq,
        t,
        workspace_lo: vec3(m.workspace_lo, "workspace_lo"),
        workspace_hi: vec3(m.workspace_hi, "workspace_hi"),
        start: vec3(m.start, "start"),
        obstacles: m.obstacles.map((o, i) => obstacle(o, `obstacles[${i}]`)),
        targets: m.targets.map((p, i) => vec3(p, `targets[${i}]`)),
        r_rob: num(m.r_rob, "r_rob"),
        d_min: num(m.d_min, "d_min"),
        v_max: num(m.v_max, "v_max"),
        u_b: num(m.u_b, "u_b"),
      };
    }
    case "metrics":
      return {
        type: "metrics",
        seq,
        t,
        targets_reached: num(m.targets_reached, "targets_reached"),
        targets_total: num(m.targets_total, "targets_total"),
        task_done: bool(m.task_done, "task_done"),
        collision: bool(m.collision, "collision"),
        dmin_violation: bool(m.dmin_violation, "dmin_violation"),
        dmin_violation_ticks: num(m.dmin_violation_ticks, "dmin_violation_ticks"),
        min_surface_distance: numOrNull(m.min_surface_distance, "min_surface_distance"),
        solve_ms_p50: num(m.solve_ms_p50, "solve_ms_p50"),
        solve_ms_p95: num(m.solve_ms_p95, "solve_ms_p95"),
        rtt_mean_ms: num(m.rtt_mean_ms, "rtt_mean_ms"),
        rtt_std_ms: num(m.rtt_std_ms, "rtt_std_ms"),
        rtt_count: num(m.rtt_count, "rtt_count"),
        sigma_k: num(m.sigma_k, "sigma_k"),
        margin: bool(m.margin, "margin"),
        delay: delayWire(m.delay),
      };
    case "busy":
      return { type: "busy", seq, t, message: str(m.message, "message") };
    case "error":
      return { type: "error", seq, t, message: str(m.message, "message") };
    default:
      fail(`unknown frame type ${String(m.type)}`);
  }
}

export function commandFrame(seq: number, u: Vec3): string {
  if (!Number.isInteger(seq) || seq < 0) throw new Error(`bad command seq ${seq}`);
  for (const c of u) {
    if (!Number.isFinite(c)) throw new Error("command components must be finite");
  }
  return JSON.stringify({ type: "command", seq, u });
}

export function configFrame(opts: { delay?: DelayWire; margin?: boolean }): string {
  const msg: Record<string, unknown> = { type: "config" };
  if (opts.delay !== undefined) msg.delay = opts.delay;
  if (opts.margin !== undefined) msg.margin = opts.margin;
  return JSON.stringify(msg);
}
