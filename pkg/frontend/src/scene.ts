import type {
  AnchorDto,
  BeaconDto,
  ExperimentDto,
  MapDto,
  NavStatusDto,
  OutEvent,
  RobotDto,
  StageDto,
  StateSnapshot,
} from "./types.js";

/** Beacon pose lifted from anchor-relative into map coordinates. */
export interface WorldBeacon {
  beacon: BeaconDto;
  x: number;
  y: number;
  yaw: number;
}

export function anchorToWorld(anchor: AnchorDto, x: number, y: number): [number, number] {
  const c = Math.cos(anchor.yaw);
  const s = Math.sin(anchor.yaw);
  return [anchor.x + c * x - s * y, anchor.y + s * x + c * y];
}

export function worldToAnchor(anchor: AnchorDto, wx: number, wy: number): [number, number] {
  const dx = wx - anchor.x;
  const dy = wy - anchor.y;
  const c = Math.cos(-anchor.yaw);
  const s = Math.sin(-anchor.yaw);
  return [c * dx - s * dy, s * dx + c * dy];
}

/**
 * The console's replica of server state: a snapshot plus applied stream
 * events.  It holds no authoritative data; re-bootstrapping from a fresh
 * snapshot must reproduce the same scene.
 */
export class SceneStore {
  mode = "off";
  beacons = new Map<string, BeaconDto>();
  robot: RobotDto = { x: 0, y: 0, yaw: 0, v: 0, w: 0 };
  navStatus: NavStatusDto = { status: "idle", reason: null };
  stages: StageDto[] = [];
  map: MapDto | null = null;
  anchor: AnchorDto = { x: 0, y: 0, yaw: 0 };
  experiment: ExperimentDto | null = null;
  lastStageResult: { stage: number; inside: boolean; heading_ok: boolean } | null = null;

  applySnapshot(s: StateSnapshot): void {
    this.mode = s.mode;
    this.beacons = new Map(s.beacons.map((b) => [b.id, b]));
    this.robot = s.robot;
    this.navStatus = s.nav_status;
    this.stages = s.stages;
    this.map = s.map;
    this.anchor = s.anchor;
    this.experiment = s.experiment;
  }

  applyEvent(e: OutEvent): void {
    switch (e.kind) {
      case "robot_pose":
        this.robot = { x: e.x, y: e.y, yaw: e.yaw, v: e.v, w: e.w };
        break;
      case "beacon_upsert":
        this.beacons.set(e.beacon.id, e.beacon);
        break;
      case "beacon_removed":
        this.beacons.delete(e.id);
        break;
      case "nav_status":
        this.navStatus = { status: e.status, reason: e.reason };
        break;
      case "stage_result":
        this.lastStageResult = { stage: e.stage, inside: e.inside, heading_ok: e.heading_ok };
        break;
    }
  }

  beaconList(): BeaconDto[] {
    return [...this.beacons.values()];
  }

  worldBeacons(): WorldBeacon[] {
    return this.beaconList().map((b) => {
      const [x, y] = anchorToWorld(this.anchor, b.x, b.y);
      return { beacon: b, x, y, yaw: b.yaw + this.anchor.yaw };
    });
  }

  transientBeacon(): BeaconDto | null {
    for (const b of this.beacons.values()) {
      if (b.transient) return b;
    }
    return null;
  }
}
