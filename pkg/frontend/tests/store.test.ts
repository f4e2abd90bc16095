import { describe, expect, it } from "vitest";

import { STALE_AFTER_S, createStore } from "../src/store.js";
import { makeMetrics, makeState, makeTask } from "./helpers.js";

function withClock() {
  let now = 100;
  const store = createStore(() => now);
  return { store, tick: (dt: number) => (now += dt) };
}

describe("frame ingestion", () => {
  it("keeps the latest of each frame kind", () => {
    const { store } = withClock();
    store.ingest(makeTask());
    store.ingest(makeState({ seq: 1, pos: [1, 0, 1] }));
    store.ingest(makeState({ seq: 2, pos: [2, 0, 1] }));
    store.ingest(makeMetrics({ seq: 3 }));

    expect(store.task?.targets).toHaveLength(2);
    expect(store.state?.pos[0]).toBe(2);
    expect(store.metrics?.seq).toBe(3);
  });

  it("busy and error frames land in lastError", () => {
    const { store } = withClock();
    store.ingest({ type: "error", seq: 5, t: 1, message: "u[2] must be a finite number" });
    expect(store.lastError).toContain("finite");
    store.ingest({ type: "busy", seq: 6, t: 1, message: "another operator is connected" });
    expect(store.busy).toBe(true);
  });

  it("a fresh connection clears stale busy/error flags", () => {
    const { store } = withClock();
    store.ingest({ type: "busy", seq: 1, t: 0, message: "occupied" });
    store.setConnected(true);
    expect(store.busy).toBe(false);
    expect(store.lastError).toBeNull();
  });
});

describe("trail", () => {
  it("appends one point per state frame in the xz plane", () => {
    const { store } = withClock();
    store.ingest(makeState({ pos: [1, 0.2, 3] }));
    store.ingest(makeState({ pos: [2, 0.2, 4] }));
    expect(store.trail).toEqual([
      { x: 1, z: 3 },
      { x: 2, z: 4 },
    ]);
  });

  it("is capped so a long session cannot grow without bound", () => {
    const { store } = withClock();
    for (let i = 0; i < 2000; i++) {
      store.ingest(makeState({ seq: i, pos: [i, 0, 0] }));
    }
    expect(store.trail.length).toBeLessThanOrEqual(1000);
    // newest points survive the cap
    expect(store.trail[store.trail.length - 1].x).toBe(1999);
  });

  it("resets when a new task arrives", () => {
    const { store } = withClock();
    store.ingest(makeState());
    store.ingest(makeTask());
    expect(store.trail).toEqual([]);
  });
});

describe("staleness", () => {
  it("fresh telemetry is not stale", () => {
    const { store, tick } = withClock();
    store.setConnected(true);
    store.ingest(makeState());
    tick(STALE_AFTER_S * 0.5);
    expect(store.isStale()).toBe(false);
  });

  it("goes stale once frames stop for more than the threshold", () => {
    const { store, tick } = withClock();
    store.setConnected(true);
    store.ingest(makeState());
    tick(STALE_AFTER_S + 0.01);
    expect(store.isStale()).toBe(true);
    expect(store.staleSeconds()).toBeGreaterThan(STALE_AFTER_S);
  });

  it("recovers when telemetry resumes", () => {
    const { store, tick } = withClock();
    store.setConnected(true);
    store.ingest(makeState());
    tick(5);
    expect(store.isStale()).toBe(true);
    store.ingest(makeState({ seq: 9 }));
    expect(store.isStale()).toBe(false);
  });

  it("disconnected always reads as stale", () => {
    const { store } = withClock();
    store.ingest(makeState());
    store.setConnected(false);
    expect(store.isStale()).toBe(true);
  });
});
