import { MapProjection } from "./projection.js";
import { SceneStore, anchorToWorld } from "./scene.js";
import type { MapDto } from "./types.js";

const COLORS = {
  free: "#f4f1ea",
  occupied: "#3a3a3a",
  stage: "#2e8b57",
  robot: "#1f6fb2",
  beacon: "#c2571a",
  beaconTransient: "rgba(194, 87, 26, 0.45)",
  highlight: "#e6c619",
  preview: "#888888",
};

export class SceneRenderer {
  private mapCanvas: HTMLCanvasElement | null = null;
  private mapKey = "";

  constructor(private readonly canvas: HTMLCanvasElement) {}

  projection(map: MapDto): MapProjection {
    return new MapProjection(map, this.canvas.width, this.canvas.height);
  }

  private renderMapBitmap(map: MapDto, proj: MapProjection): HTMLCanvasElement {
    const key = `${map.width}x${map.height}@${map.resolution}`;
    if (this.mapCanvas !== null && this.mapKey === key) {
      return this.mapCanvas;
    }
    const off = document.createElement("canvas");
    off.width = this.canvas.width;
    off.height = this.canvas.height;
    const ctx = off.getContext("2d")!;
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, off.width, off.height);
    const cell = proj.metersToPixels(map.resolution);
    for (let r = 0; r < map.rows.length; r++) {
      const row = map.rows[r]; // top row first
      const jy = map.height - 1 - r;
      for (let i = 0; i < row.length; i++) {
        const [px, py] = proj.toPixel(
          map.origin_x + i * map.resolution,
          map.origin_y + (jy + 1) * map.resolution,
        );
        ctx.fillStyle = row[i] === "#" ? COLORS.occupied : COLORS.free;
        ctx.fillRect(px, py, cell + 0.5, cell + 0.5);
      }
    }
    this.mapCanvas = off;
    this.mapKey = key;
    return off;
  }

  private drawFootprint(
    ctx: CanvasRenderingContext2D,
    proj: MapProjection,
    x: number,
    y: number,
    yaw: number,
    length: number,
    width: number,
    fill: string,
    stroke: string,
    dashed = false,
  ): void {
    const [px, py] = proj.toPixel(x, y);
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-yaw); // canvas y is flipped, so rotation flips too
    const lw = proj.metersToPixels(length);
    const ww = proj.metersToPixels(width);
    ctx.setLineDash(dashed ? [4, 3] : []);
    ctx.fillStyle = fill;
    ctx.strokeStyle = stroke;
    ctx.lineWidth = 1.5;
    ctx.fillRect(-lw / 2, -ww / 2, lw, ww);
    ctx.strokeRect(-lw / 2, -ww / 2, lw, ww);
    // heading wedge
    ctx.beginPath();
    ctx.moveTo(lw / 2, 0);
    ctx.lineTo(lw / 6, -ww / 3);
    ctx.lineTo(lw / 6, ww / 3);
    ctx.closePath();
    ctx.fillStyle = stroke;
    ctx.fill();
    ctx.restore();
  }

  render(scene: SceneStore, cursor: { x: number; y: number } | null): void {
    const ctx = this.canvas.getContext("2d")!;
    if (scene.map === null) {
      ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
      return;
    }
    const proj = this.projection(scene.map);
    ctx.drawImage(this.renderMapBitmap(scene.map, proj), 0, 0);

    for (const st of scene.stages) {
      const [px, py] = proj.toPixel(st.cx, st.cy);
      ctx.save();
      ctx.translate(px, py);
      ctx.rotate(-st.yaw);
      const w = proj.metersToPixels(st.w);
      const h = proj.metersToPixels(st.h);
      ctx.strokeStyle = COLORS.stage;
      ctx.lineWidth = 2;
      ctx.setLineDash([]);
      ctx.strokeRect(-w / 2, -h / 2, w, h);
      // filled triangle showing the required heading
      ctx.rotate(-(st.target_yaw - st.yaw));
      ctx.beginPath();
      ctx.moveTo(w / 5, 0);
      ctx.lineTo(-w / 10, -h / 8);
      ctx.lineTo(-w / 10, h / 8);
      ctx.closePath();
      ctx.fillStyle = COLORS.stage;
      ctx.fill();
      ctx.restore();
      ctx.fillStyle = COLORS.stage;
      ctx.font = "12px sans-serif";
      ctx.fillText(String(st.id), px - w / 2 + 4, py - h / 2 + 14);
    }

    for (const wb of scene.worldBeacons()) {
      const b = wb.beacon;
      const fill = b.highlight
        ? COLORS.highlight
        : b.transient
          ? COLORS.beaconTransient
          : COLORS.beacon;
      this.drawFootprint(
        ctx, proj, wb.x, wb.y, wb.yaw, b.length, b.width,
        fill, COLORS.beacon, b.transient,
      );
      // direction preview: line from the actively placed beacon to the cursor
      if (b.transient && cursor !== null) {
        const [bx, by] = proj.toPixel(wb.x, wb.y);
        const [cx2, cy2] = proj.toPixel(cursor.x, cursor.y);
        ctx.save();
        ctx.strokeStyle = COLORS.preview;
        ctx.setLineDash([3, 3]);
        ctx.beginPath();
        ctx.moveTo(bx, by);
        ctx.lineTo(cx2, cy2);
        ctx.stroke();
        ctx.restore();
      }
    }

    const r = scene.robot;
    this.drawFootprint(
      ctx, proj, r.x, r.y, r.yaw, 0.39, 0.24, "rgba(31,111,178,0.85)", COLORS.robot,
    );
  }
}
