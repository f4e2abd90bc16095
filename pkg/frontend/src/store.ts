// Single mutable snapshot of everything the cockpit knows about the
// server. Frames flow in through ingest(); the render loop only reads.
// The wall clock is injected so staleness is testable without waiting.

import type { MetricsFrame, ServerFrame, StateFrame, TaskFrame } from "./protocol.js";
import type { WorldPoint } from "./viewport.js";

export const STALE_AFTER_S = 1.0;
const TRAIL_CAP = 900;

export interface CockpitStore {
  task: TaskFrame | null;
  state: StateFrame | null;
  metrics: MetricsFrame | null;
  trail: WorldPoint[];
  lastError: string | null;
  busy: boolean;
  connected: boolean;
  ingest(frame: ServerFrame): void;
  setConnected(up: boolean): void;
  staleSeconds(): number;
  isStale(): boolean;
}

export function createStore(clock: () => number): CockpitStore {
  let lastStateAt = -Infinity;

  const store: CockpitStore = {
    task: null,
    state: null,
    metrics: null,
    trail: [],
    lastError: null,
    busy: false,
    connected: false,

    ingest(frame) {
      switch (frame.type) {
        case "task":
          store.task = frame;
          store.trail = [];
          break;
        case "state":
          store.state = frame;
          lastStateAt = clock();
          store.trail.push({ x: frame.pos[0], z: frame.pos[2] });
          if (store.trail.length > TRAIL_CAP) {
            store.trail.splice(0, store.trail.length - TRAIL_CAP);
          }
          break;
        case "metrics":
          store.metrics = frame;
          break;
        case "busy":
          store.busy = true;
          store.lastError = frame.message;
          break;
        case "error":
          store.lastError = frame.message;
          break;
      }
    },

    setConnected(up) {
      store.connected = up;
      if (up) {
        store.busy = false;
        store.lastError = null;
      }
    },

    staleSeconds() {
      return clock() - lastStateAt;
    },

    isStale() {
      return !store.connected || store.staleSeconds() > STALE_AFTER_S;
    },
  };
  return store;
}
