import type { BeaconDto } from "./types.js";

/** Is (px, py) inside a w-by-l rectangle centered at (cx, cy), rotated by yaw?
 *  The length runs along the heading, the width across it. */
export function pointInRotatedRect(
  px: number,
  py: number,
  cx: number,
  cy: number,
  length: number,
  width: number,
  yaw: number,
): boolean {
  const dx = px - cx;
  const dy = py - cy;
  const c = Math.cos(-yaw);
  const s = Math.sin(-yaw);
  const lx = c * dx - s * dy;
  const ly = s * dx + c * dy;
  return Math.abs(lx) <= length / 2 && Math.abs(ly) <= width / 2;
}

/** Topmost beacon under an anchor-relative floor point, or null for floor.
 *  Later entries in the list win, matching draw order. */
export function hitTestBeacons(beacons: readonly BeaconDto[], x: number, y: number): string | null {
  for (let i = beacons.length - 1; i >= 0; i--) {
    const b = beacons[i];
    if (pointInRotatedRect(x, y, b.x, b.y, b.length, b.width, b.yaw)) {
      return b.id;
    }
  }
  return null;
}
