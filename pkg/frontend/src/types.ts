// Wire types for the beaconnav server HTTP API and event stream.

export interface BeaconDto {
  id: string;
  x: number;
  y: number;
  z: number;
  qx: number;
  qy: number;
  qz: number;
  qw: number;
  yaw: number;
  length: number;
  width: number;
  height: number;
  transient: boolean;
  highlight: boolean;
}

export interface RobotDto {
  x: number;
  y: number;
  yaw: number;
  v: number;
  w: number;
}

export interface NavStatusDto {
  status: string;
  reason: string | null;
}

export interface StageDto {
  id: number;
  cx: number;
  cy: number;
  w: number;
  h: number;
  yaw: number;
  target_yaw: number;
  yaw_tol: number;
}

export interface MapDto {
  resolution: number;
  origin_x: number;
  origin_y: number;
  width: number;
  height: number;
  rows: string[];
}

export interface AnchorDto {
  x: number;
  y: number;
  yaw: number;
}

export interface ExperimentDto {
  participant: string;
  system: string;
  current_stage: number | null;
  complete: boolean;
}

export interface StateSnapshot {
  mode: string;
  beacons: BeaconDto[];
  robot: RobotDto;
  nav_status: NavStatusDto;
  stages: StageDto[];
  map: MapDto;
  anchor: AnchorDto;
  experiment: ExperimentDto | null;
}

export type OutEvent =
  | { kind: "robot_pose"; t: number; x: number; y: number; yaw: number; v: number; w: number }
  | { kind: "beacon_upsert"; beacon: BeaconDto }
  | { kind: "beacon_removed"; id: string }
  | { kind: "nav_status"; status: string; reason: string | null }
  | { kind: "stage_result"; stage: number; inside: boolean; heading_ok: boolean };

export type PointerKind = "down" | "drag" | "up" | "click";

export interface PointerMessage {
  kind: PointerKind;
  x: number;
  y: number;
  hit: string | null;
}

export const MODES = ["off", "add", "move", "select", "delete"] as const;
export type ModeName = (typeof MODES)[number];
