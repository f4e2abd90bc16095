// WebSocket glue between the server and the store. The socket
// constructor is injected so tests can drive the client with a scripted
// fake instead of a live connection.

import { commandFrame, configFrame, parseServerFrame } from "./protocol.js";
import type { DelayWire, Vec3 } from "./protocol.js";
import type { CockpitStore } from "./store.js";

export interface SocketLike {
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface TeleopClient {
  connect(): void;
  close(): void;
  isOpen(): boolean;
  nextSeq(): number;
  sendCommand(u: Vec3): boolean;
  sendConfig(opts: { delay?: DelayWire; margin?: boolean }): boolean;
}

export function createClient(
  url: string,
  store: CockpitStore,
  makeSocket: SocketFactory,
): TeleopClient {
  let sock: SocketLike | null = null;
  let open = false;
  // command seq is monotone for the whole session, across reconnects,
  // so a reconnect can never look like a replay to the server
  let seq = 0;

  function handleMessage(raw: unknown): void {
    if (typeof raw !== "string") {
      store.lastError = "non-text frame from server";
      return;
    }
    try {
      store.ingest(parseServerFrame(raw));
    } catch (err) {
      store.lastError = err instanceof Error ? err.message : String(err);
    }
  }

  return {
    connect() {
      if (sock) return;
      const s = makeSocket(url);
      sock = s;
      s.onopen = () => {
        open = true;
        store.setConnected(true);
      };
      s.onclose = () => {
        open = false;
        store.setConnected(false);
        if (sock === s) sock = null;
      };
      s.onerror = () => {
        store.lastError = "socket error";
      };
      s.onmessage = (ev) => handleMessage(ev.data);
    },

    close() {
      const s = sock;
      sock = null;
      open = false;
      if (s) s.close();
      store.setConnected(false);
    },

    isOpen() {
      return open;
    },

    nextSeq() {
      return seq;
    },

    sendCommand(u) {
      if (!open || !sock) return false;
      sock.send(commandFrame(seq, u));
      seq += 1;
      return true;
    },

    sendConfig(opts) {
      if (!open || !sock) return false;
      sock.send(configFrame(opts));
      return true;
    },
  };
}
