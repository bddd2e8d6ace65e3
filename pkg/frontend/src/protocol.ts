/** Wire types for the /session WebSocket and a tolerant parser.
 *
 *  Every HUD number the client shows comes from these messages; the client
 *  never computes metrics itself.
 */

import { Quat, Vec3 } from "./math3d";

/** Rigid pose as serialized by the server: quaternion (w, x, y, z) plus translation. */
export interface WirePose {
  rotation: [number, number, number, number];
  translation: [number, number, number];
}

export interface SceneDoc {
  kind: "scene_config";
  task: {
    peg_height: number;
    peg_capture_radius: number;
    ring_circle_radius: number;
    ring_rest_height: number;
    grasp_radius: number;
    jaw_close_threshold: number;
    jaw_open_threshold: number;
    placement_height_margin: number;
    respawn_delay_s: number;
    tick_dt: number;
    require_handover: boolean;
  };
  protocol: {
    familiarization_s: number;
    trial_s: number;
    trials: number;
    break_s: number;
  };
  teleop: {
    translation_scale: number;
    camera_translation_scale: number;
  };
  instruments: Record<string, WirePose>;
}

export interface AckMsg {
  type: "ack";
  input_mode: "pose" | "raw";
  tick_rate_hz: number;
  snapshot_rate_hz: number;
  heartbeat_s: number;
  scene: SceneDoc;
}

export interface PhaseInfo {
  name: "idle" | "familiarization" | "trial" | "break" | "done";
  trial_index: number | null;
  elapsed_s: number;
  duration_s: number | null;
}

export interface InstrumentSnapshot {
  id: number;
  joints: number[];
  tip: WirePose;
  jaw: number;
}

export type RingStateName =
  "on_peg" | "grasped" | "grasped_both" | "falling" | "respawning";

export interface RingSnapshot {
  id: number;
  state: RingStateName;
  pose: WirePose;
  peg: number | null;
}

export interface StateMsg {
  type: "state";
  t_us: number;
  mode: "normal" | "camera_adjust";
  phase: PhaseInfo;
  instruments: InstrumentSnapshot[];
  rings: RingSnapshot[];
  camera: WirePose;
}

export interface EventMsg {
  type: "event";
  t_us: number;
  kind: string;
  data: Record<string, unknown>;
}

export interface MetricsMsg {
  type: "metrics";
  trial_id: number;
  duration_s: number;
  transfers: number;
  drops: number;
  avg_transfer_time_s: number | null;
  total_path_length_m: number;
  path_length_by_instrument: Record<string, number>;
  truncated: boolean;
  events: { t_us: number; kind: string; data: Record<string, unknown> }[];
}

export interface HapticMsg {
  type: "haptic";
  controller: number;
  amplitude: number;
  duration_ms: number;
}

export interface ErrorMsg {
  type: "error";
  reason: string;
}

export interface PingMsg {
  type: "ping";
}

export type ServerMsg =
  AckMsg | StateMsg | EventMsg | MetricsMsg | HapticMsg | ErrorMsg | PingMsg;

export interface MalformedMsg {
  type: "malformed";
  reason: string;
}

const SERVER_TYPES = new Set([
  "ack", "state", "event", "metrics", "haptic", "error", "ping",
]);

/** Parse one frame from the server. Unknown or structurally broken frames
 *  come back as "malformed" so the caller can surface them without throwing
 *  inside the socket handler. */
export function parseServerMessage(text: string): ServerMsg | MalformedMsg {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return { type: "malformed", reason: "frame is not valid JSON" };
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return { type: "malformed", reason: "frame must be a JSON object" };
  }
  const msg = raw as Record<string, unknown>;
  const mtype = msg.type;
  if (typeof mtype !== "string" || !SERVER_TYPES.has(mtype)) {
    return { type: "malformed", reason: `unknown message type ${String(mtype)}` };
  }
  if (mtype === "state") {
    if (!Array.isArray(msg.instruments) || !Array.isArray(msg.rings) ||
        typeof msg.phase !== "object" || msg.phase === null ||
        !isPose(msg.camera)) {
      return { type: "malformed", reason: "state frame missing fields" };
    }
  }
  if (mtype === "ack" && (typeof msg.scene !== "object" || msg.scene === null)) {
    return { type: "malformed", reason: "ack frame missing scene" };
  }
  if (mtype === "error" && typeof msg.reason !== "string") {
    return { type: "malformed", reason: "error frame missing reason" };
  }
  return msg as unknown as ServerMsg;
}

function isPose(v: unknown): v is WirePose {
  if (typeof v !== "object" || v === null) return false;
  const p = v as Record<string, unknown>;
  return Array.isArray(p.rotation) && p.rotation.length === 4 &&
    Array.isArray(p.translation) && p.translation.length === 3;
}

export function poseQuat(pose: WirePose): Quat {
  return [pose.rotation[0], pose.rotation[1], pose.rotation[2], pose.rotation[3]];
}

export function posePosition(pose: WirePose): Vec3 {
  return [pose.translation[0], pose.translation[1], pose.translation[2]];
}

// -- client -> server ------------------------------------------------------------

export interface InputMsg {
  type: "input";
  controller: number;
  t_us: number;
  pose: { p: [number, number, number]; q: [number, number, number, number] };
  button: boolean;
  jaw: number;
}

export function helloMessage(role: string): string {
  return JSON.stringify({ type: "hello", role });
}

export function pongMessage(): string {
  return JSON.stringify({ type: "pong" });
}

export function trialMessage(cmd: "start" | "stop" | "reset"): string {
  return JSON.stringify({ type: "trial", cmd });
}
