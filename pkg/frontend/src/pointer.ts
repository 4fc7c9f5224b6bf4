import type { PointerMessage } from "./types.js";

export interface PointerPipelineOptions {
  /** Delivers one pointer message to the server (ordering is the caller's job). */
  send: (msg: PointerMessage) => void;
  /** Current toolbar mode. */
  getMode: () => string;
  /** Whether a placement is in progress (a transient beacon exists). */
  hasTransient: () => boolean;
  /** Topmost beacon id under an anchor-relative floor point, null for floor. */
  hitTest: (x: number, y: number) => string | null;
  /** Millisecond clock, injectable for tests. */
  now?: () => number;
  /** Drag forwarding cap. */
  dragHz?: number;
}

/**
 * Translates raw mouse/touch gestures into the server's pointer protocol.
 *
 * Two rules beyond plain forwarding:
 *  - drags are throttled (dropped, not queued) to at most dragHz;
 *  - the browser fires a click at the end of every press, but a press that
 *    STARTED a placement (add on floor, move on a beacon) must not commit
 *    the direction in the same gesture, so that click is suppressed.  The
 *    later confirmation tap happens while a transient beacon exists, which
 *    is how the pipeline tells the two apart.
 */
export class PointerPipeline {
  private readonly send: (msg: PointerMessage) => void;
  private readonly getMode: () => string;
  private readonly hasTransient: () => boolean;
  private readonly hitTest: (x: number, y: number) => string | null;
  private readonly now: () => number;
  private readonly minDragGapMs: number;
  private lastDragAt = -Infinity;
  private suppressNextClick = false;

  constructor(opts: PointerPipelineOptions) {
    this.send = opts.send;
    this.getMode = opts.getMode;
    this.hasTransient = opts.hasTransient;
    this.hitTest = opts.hitTest;
    this.now = opts.now ?? (() => performance.now());
    this.minDragGapMs = 1000 / (opts.dragHz ?? 30);
  }

  pointerDown(x: number, y: number): void {
    const hit = this.hitTest(x, y);
    const mode = this.getMode();
    this.suppressNextClick =
      !this.hasTransient() &&
      ((mode === "add" && hit === null) || (mode === "move" && hit !== null));
    this.lastDragAt = -Infinity; // never swallow the first drag of a gesture
    this.send({ kind: "down", x, y, hit });
  }

  pointerMove(x: number, y: number, buttonDown: boolean): void {
    // Hover motion matters during direction setting; otherwise only while
    // the button is held.  Excess drags are dropped, never queued.
    if (!buttonDown && !this.hasTransient()) {
      return;
    }
    const t = this.now();
    if (t - this.lastDragAt < this.minDragGapMs) {
      return;
    }
    this.lastDragAt = t;
    this.send({ kind: "drag", x, y, hit: this.hitTest(x, y) });
  }

  pointerUp(x: number, y: number): void {
    this.send({ kind: "up", x, y, hit: this.hitTest(x, y) });
  }

  pointerClick(x: number, y: number): void {
    if (this.suppressNextClick) {
      this.suppressNextClick = false;
      return;
    }
    this.send({ kind: "click", x, y, hit: this.hitTest(x, y) });
  }
}
