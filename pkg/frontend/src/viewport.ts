// Maps the xz workspace plane onto canvas pixels. World x runs right,
// world z runs up the screen, so screen y is flipped. The transform is a
// uniform scale plus translation and stays exactly invertible.

export interface WorldPoint {
  x: number;
  z: number;
}

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface Viewport {
  readonly width: number;
  readonly height: number;
  scale: number; // pixels per meter
  center: WorldPoint;
  fitToWorkspace(lo: WorldPoint, hi: WorldPoint, padding?: number): void;
  worldToScreen(p: WorldPoint): ScreenPoint;
  screenToWorld(p: ScreenPoint): WorldPoint;
  metersToPixels(meters: number): number;
  zoomAt(anchor: ScreenPoint, factor: number): void;
  panBy(dxPixels: number, dyPixels: number): void;
}

export function createViewport(width: number, height: number): Viewport {
  const vp: Viewport = {
    width,
    height,
    scale: 1,
    center: { x: 0, z: 0 },

    fitToWorkspace(lo, hi, padding = 0.05) {
      const spanX = Math.max(hi.x - lo.x, 1e-9);
      const spanZ = Math.max(hi.z - lo.z, 1e-9);
      const usable = 1 - 2 * padding;
      vp.scale = Math.min((width * usable) / spanX, (height * usable) / spanZ);
      vp.center = { x: (lo.x + hi.x) / 2, z: (lo.z + hi.z) / 2 };
    },

    worldToScreen(p) {
      return {
        x: width / 2 + (p.x - vp.center.x) * vp.scale,
        y: height / 2 - (p.z - vp.center.z) * vp.scale,
      };
    },

    screenToWorld(p) {
      return {
        x: vp.center.x + (p.x - width / 2) / vp.scale,
        z: vp.center.z - (p.y - height / 2) / vp.scale,
      };
    },

    metersToPixels(meters) {
      return meters * vp.scale;
    },

    zoomAt(anchor, factor) {
      if (!(factor > 0)) throw new Error(`zoom factor must be positive, got ${factor}`);
      // keep the world point under the anchor fixed on screen
      const pinned = vp.screenToWorld(anchor);
      vp.scale *= factor;
      const moved = vp.screenToWorld(anchor);
      vp.center = {
        x: vp.center.x + (pinned.x - moved.x),
        z: vp.center.z + (pinned.z - moved.z),
      };
    },

    panBy(dxPixels, dyPixels) {
      vp.center = {
        x: vp.center.x - dxPixels / vp.scale,
        z: vp.center.z + dyPixels / vp.scale,
      };
    },
  };
  return vp;
}
