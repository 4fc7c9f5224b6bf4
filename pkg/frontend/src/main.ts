import { ApiClient } from "./api.js";
import { hitTestBeacons } from "./hittest.js";
import { PointerPipeline } from "./pointer.js";
import { SceneRenderer } from "./render.js";
import { SceneStore, worldToAnchor } from "./scene.js";
import { createToolbar } from "./toolbar.js";
import type { PointerMessage } from "./types.js";

const params = new URLSearchParams(window.location.search);
const serverBase = params.get("server") ?? "http://127.0.0.1:8080";

const canvas = document.getElementById("view") as HTMLCanvasElement | null;
const toolbarEl = document.getElementById("toolbar");
const statusEl = document.getElementById("status");
const bannerEl = document.getElementById("banner");
if (!canvas || !toolbarEl || !statusEl || !bannerEl) {
  throw new Error("console markup is missing required elements");
}

const api = new ApiClient(serverBase);
const scene = new SceneStore();
const renderer = new SceneRenderer(canvas);

let connected = false;
let cursorWorld: { x: number; y: number } | null = null;

// Outbound pointer messages ride one promise chain so ordering is preserved;
// while disconnected they are dropped, not queued.
let sendChain: Promise<void> = Promise.resolve();
function sendPointer(msg: PointerMessage): void {
  if (!connected) return;
  sendChain = sendChain
    .then(() => api.postPointer(msg))
    .catch(() => {
      /* 4xx on stale hits is harmless; connection loss is handled below */
    });
}

const toolbar = createToolbar(toolbarEl, async (mode) => {
  await api.postMode(mode);
  scene.mode = mode;
});

const pipeline = new PointerPipeline({
  send: sendPointer,
  getMode: () => scene.mode,
  hasTransient: () => scene.transientBeacon() !== null,
  hitTest: (x, y) => hitTestBeacons(scene.beaconList(), x, y),
});

function canvasToWorld(ev: MouseEvent): [number, number] {
  const rect = canvas!.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) / rect.width) * canvas!.width;
  const py = ((ev.clientY - rect.top) / rect.height) * canvas!.height;
  if (scene.map === null) return [0, 0];
  return renderer.projection(scene.map).toWorld(px, py);
}

let buttonDown = false;
canvas.addEventListener("mousedown", (ev) => {
  buttonDown = true;
  const [wx, wy] = canvasToWorld(ev);
  const [x, y] = worldToAnchor(scene.anchor, wx, wy);
  pipeline.pointerDown(x, y);
});
canvas.addEventListener("mousemove", (ev) => {
  const [wx, wy] = canvasToWorld(ev);
  cursorWorld = { x: wx, y: wy };
  const [x, y] = worldToAnchor(scene.anchor, wx, wy);
  pipeline.pointerMove(x, y, buttonDown);
});
canvas.addEventListener("mouseup", (ev) => {
  buttonDown = false;
  const [wx, wy] = canvasToWorld(ev);
  const [x, y] = worldToAnchor(scene.anchor, wx, wy);
  pipeline.pointerUp(x, y);
});
canvas.addEventListener("click", (ev) => {
  const [wx, wy] = canvasToWorld(ev);
  const [x, y] = worldToAnchor(scene.anchor, wx, wy);
  pipeline.pointerClick(x, y);
});

function setBanner(text: string | null): void {
  bannerEl!.textContent = text ?? "";
  bannerEl!.style.display = text === null ? "none" : "block";
}

function statusLine(): string {
  const nav = scene.navStatus;
  const parts = [`mode: ${scene.mode}`, `nav: ${nav.status}${nav.reason ? ` (${nav.reason})` : ""}`];
  const r = scene.robot;
  parts.push(`robot: ${r.x.toFixed(2)}, ${r.y.toFixed(2)} @ ${((r.yaw * 180) / Math.PI).toFixed(0)}°`);
  if (scene.experiment) {
    parts.push(
      scene.experiment.complete
        ? "experiment: complete"
        : `experiment: stage ${scene.experiment.current_stage}`,
    );
  }
  if (scene.lastStageResult) {
    const sr = scene.lastStageResult;
    parts.push(`stage ${sr.stage}: ${sr.inside ? "inside" : "outside"}, heading ${sr.heading_ok ? "ok" : "off"}`);
  }
  return parts.join("   ");
}

async function bootstrap(): Promise<void> {
  const snapshot = await api.getState();
  scene.applySnapshot(snapshot);
  toolbar.setActive(scene.mode);
  connected = true;
  setBanner(null);
}

function connectStream(): void {
  api.streamEvents(
    (e) => scene.applyEvent(e),
    async () => {
      connected = false;
      setBanner(`connection to ${serverBase} lost, retrying`);
      await new Promise((r) => setTimeout(r, 1000));
      for (;;) {
        try {
          await bootstrap(); // re-bootstrapping restores the exact scene
          break;
        } catch {
          await new Promise((r) => setTimeout(r, 1000));
        }
      }
      connectStream();
    },
  );
}

function frame(): void {
  renderer.render(scene, cursorWorld);
  statusEl!.textContent = statusLine();
  requestAnimationFrame(frame);
}

bootstrap()
  .then(() => {
    connectStream();
    frame();
  })
  .catch((err) => {
    setBanner(`cannot reach ${serverBase}: ${err}`);
    setTimeout(() => window.location.reload(), 2000);
  });
