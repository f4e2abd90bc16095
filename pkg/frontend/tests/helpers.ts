// Shared frame builders for the unit tests.

import type { MetricsFrame, StateFrame, TaskFrame } from "../src/protocol.js";

export function makeTask(overrides: Partial<TaskFrame> = {}): TaskFrame {
  return {
    type: "task",
    seq: 0,
    t: 0,
    workspace_lo: [-5, -1, 0],
    workspace_hi: [5, 1, 6],
    start: [0, 0, 0.5],
    obstacles: [{ center: [1.5, 0, 2], radius: 0.3 }],
    targets: [
      [3, 0, 1],
      [-2, 0, 4],
    ],
    r_rob: 0.18371173070873836,
    d_min: 0.01,
    v_max: 0.87,
    u_b: 0.5,
    ...overrides,
  };
}

export function makeState(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    seq: 1,
    t: 0.1,
    pos: [0, 0, 0.5],
    vel: [0, 0, 0],
    sigma_k: 0,
    rtt_mean_ms: 0,
    min_surf_dist: 1.0,
    targets_remaining: 2,
    ...overrides,
  };
}

export function makeMetrics(overrides: Partial<MetricsFrame> = {}): MetricsFrame {
  return {
    type: "metrics",
    seq: 2,
    t: 0.5,
    targets_reached: 0,
    targets_total: 2,
    task_done: false,
    collision: false,
    dmin_violation: false,
    dmin_violation_ticks: 0,
    min_surface_distance: 1.0,
    solve_ms_p50: 4.0,
    solve_ms_p95: 9.0,
    rtt_mean_ms: 100.0,
    rtt_std_ms: 20.0,
    rtt_count: 30,
    sigma_k: 0.2,
    margin: true,
    delay: { kind: "gaussian", mean_ms: 50, std_ms: 20 },
    ...overrides,
  };
}
