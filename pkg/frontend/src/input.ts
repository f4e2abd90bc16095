// Keyboard and gamepad state -> desired velocity in the xz plane.
//
// WASD and the arrow keys steer at full speed in the pressed direction;
// a gamepad stick gives proportional speed and, while deflected past the
// deadzone, overrides whatever keys are held. The y component is always
// zero and the returned norm never exceeds vMax.

import type { Vec3 } from "./protocol.js";

const KEY_AXES: Record<string, [number, number]> = {
  KeyW: [0, 1],
  ArrowUp: [0, 1],
  KeyS: [0, -1],
  ArrowDown: [0, -1],
  KeyA: [-1, 0],
  ArrowLeft: [-1, 0],
  KeyD: [1, 0],
  ArrowRight: [1, 0],
};

export const GAMEPAD_DEADZONE = 0.15;

export interface InputTracker {
  keyDown(code: string): void;
  keyUp(code: string): void;
  clearKeys(): void;
  setGamepadAxes(axes: readonly number[] | null): void;
  desiredVelocity(vMax: number): Vec3;
  active(): boolean;
}

export function createInputTracker(): InputTracker {
  const pressed = new Set<string>();
  let stick: [number, number] | null = null; // [x, z] after deadzone

  function keyVector(): [number, number] {
    let x = 0;
    let z = 0;
    for (const code of pressed) {
      const axis = KEY_AXES[code];
      if (axis) {
        x += axis[0];
        z += axis[1];
      }
    }
    return [x, z];
  }

  function planarVelocity(vMax: number): [number, number] {
    if (stick) {
      const mag = Math.hypot(stick[0], stick[1]);
      const clipped = Math.min(mag, 1);
      if (mag === 0) return [0, 0];
      return [(stick[0] / mag) * clipped * vMax, (stick[1] / mag) * clipped * vMax];
    }
    const [x, z] = keyVector();
    const mag = Math.hypot(x, z);
    if (mag === 0) return [0, 0];
    return [(x / mag) * vMax, (z / mag) * vMax];
  }

  return {
    keyDown(code) {
      if (code in KEY_AXES) pressed.add(code);
    },
    keyUp(code) {
      pressed.delete(code);
    },
    clearKeys() {
      pressed.clear();
    },
    setGamepadAxes(axes) {
      if (!axes || axes.length < 2) {
        stick = null;
        return;
      }
      const x = axes[0];
      const z = -axes[1]; // stick up is negative on the hardware axis
      if (Math.hypot(x, z) < GAMEPAD_DEADZONE) {
        stick = null;
        return;
      }
      stick = [x, z];
    },
    desiredVelocity(vMax) {
      const [x, z] = planarVelocity(vMax);
      return [x, 0, z];
    },
    active() {
      return stick !== null || keyVector().some((c) => c !== 0);
    },
  };
}
