import { describe, expect, it } from "vitest";

import { GAMEPAD_DEADZONE, createInputTracker } from "../src/input.js";

const V_MAX = 0.87;

function norm(v: readonly number[]): number {
  return Math.hypot(...v);
}

describe("keyboard steering", () => {
  it.each([
    ["KeyW", [0, 0, 1]],
    ["ArrowUp", [0, 0, 1]],
    ["KeyS", [0, 0, -1]],
    ["ArrowDown", [0, 0, -1]],
    ["KeyA", [-1, 0, 0]],
    ["ArrowLeft", [-1, 0, 0]],
    ["KeyD", [1, 0, 0]],
    ["ArrowRight", [1, 0, 0]],
  ])("%s steers along %j", (code, dir) => {
    const tracker = createInputTracker();
    tracker.keyDown(code);
    const u = tracker.desiredVelocity(V_MAX);
    expect(u[0]).toBeCloseTo(dir[0] * V_MAX, 12);
    expect(u[1]).toBe(0);
    expect(u[2]).toBeCloseTo(dir[2] * V_MAX, 12);
  });

  it("returns zero with nothing held", () => {
    const tracker = createInputTracker();
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);
    expect(tracker.active()).toBe(false);
  });

  it("normalises diagonals to exactly vMax", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyW");
    tracker.keyDown("KeyD");
    const u = tracker.desiredVelocity(V_MAX);
    expect(norm(u)).toBeCloseTo(V_MAX, 12);
    expect(u[0]).toBeCloseTo(u[2], 12);
  });

  it("opposing keys cancel", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyA");
    tracker.keyDown("KeyD");
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);
  });

  it("keyUp releases and clearKeys flushes everything", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyW");
    tracker.keyUp("KeyW");
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);

    tracker.keyDown("KeyW");
    tracker.keyDown("KeyD");
    tracker.clearKeys();
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);
  });

  it("ignores unbound keys", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyQ");
    tracker.keyDown("Space");
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);
  });
});

describe("gamepad steering", () => {
  it("stick below the deadzone is ignored", () => {
    const tracker = createInputTracker();
    tracker.setGamepadAxes([GAMEPAD_DEADZONE * 0.6, 0]);
    expect(tracker.desiredVelocity(V_MAX)).toEqual([0, 0, 0]);
  });

  it("deflection is proportional, capped at vMax", () => {
    const tracker = createInputTracker();
    tracker.setGamepadAxes([0.5, 0]);
    expect(tracker.desiredVelocity(V_MAX)[0]).toBeCloseTo(0.5 * V_MAX, 12);

    tracker.setGamepadAxes([1.0, 1.0]); // corner: magnitude sqrt(2), must clip
    expect(norm(tracker.desiredVelocity(V_MAX))).toBeCloseTo(V_MAX, 12);
  });

  it("stick up (negative hardware y) drives +z", () => {
    const tracker = createInputTracker();
    tracker.setGamepadAxes([0, -1]);
    const u = tracker.desiredVelocity(V_MAX);
    expect(u[2]).toBeCloseTo(V_MAX, 12);
    expect(u[0]).toBeCloseTo(0, 12);
  });

  it("overrides held keys while deflected, releases back to keys", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyD"); // keys say +x
    tracker.setGamepadAxes([0, 1]); // stick says -z
    let u = tracker.desiredVelocity(V_MAX);
    expect(u[0]).toBeCloseTo(0, 12);
    expect(u[2]).toBeCloseTo(-V_MAX, 12);

    tracker.setGamepadAxes([0, 0]); // stick centered: keys take over again
    u = tracker.desiredVelocity(V_MAX);
    expect(u[0]).toBeCloseTo(V_MAX, 12);
  });

  it("y stays zero for any input", () => {
    const tracker = createInputTracker();
    tracker.keyDown("KeyW");
    tracker.setGamepadAxes([0.7, -0.3]);
    expect(tracker.desiredVelocity(V_MAX)[1]).toBe(0);
  });
});
