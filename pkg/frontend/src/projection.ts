import type { MapDto } from "./types.js";

/**
 * Meters-to-pixels projection that letterboxes the whole map into a canvas.
 * Screen y grows downward, map y grows upward, so the vertical axis flips.
 */
export class MapProjection {
  readonly scale: number; // pixels per meter
  readonly padX: number;
  readonly padY: number;
  readonly worldW: number;
  readonly worldH: number;

  constructor(
    map: Pick<MapDto, "resolution" | "origin_x" | "origin_y" | "width" | "height">,
    readonly canvasW: number,
    readonly canvasH: number,
    private readonly originX = map.origin_x,
    private readonly originY = map.origin_y,
  ) {
    this.worldW = map.width * map.resolution;
    this.worldH = map.height * map.resolution;
    this.scale = Math.min(canvasW / this.worldW, canvasH / this.worldH);
    this.padX = (canvasW - this.worldW * this.scale) / 2;
    this.padY = (canvasH - this.worldH * this.scale) / 2;
  }

  toPixel(x: number, y: number): [number, number] {
    return [
      this.padX + (x - this.originX) * this.scale,
      this.canvasH - this.padY - (y - this.originY) * this.scale,
    ];
  }

  toWorld(px: number, py: number): [number, number] {
    return [
      this.originX + (px - this.padX) / this.scale,
      this.originY + (this.canvasH - this.padY - py) / this.scale,
    ];
  }

  metersToPixels(m: number): number {
    return m * this.scale;
  }
}
