/** Shared builders: wire documents shaped exactly like the server's. */

import {
  InstrumentSnapshot, RingSnapshot, SceneDoc, StateMsg, WirePose,
} from "../src/protocol";

/** quat_from_matrix(rotX(pi/2)): the instruments' shaft-down mount. */
export const DOWN_QUAT: [number, number, number, number] =
  [0.7071067811865476, 0.7071067811865475, 0, 0];

export function identityPose(p: [number, number, number] = [0, 0, 0]): WirePose {
  return { rotation: [1, 0, 0, 0], translation: p };
}

export function sceneDoc(): SceneDoc {
  return {
    kind: "scene_config",
    task: {
      peg_height: 0.015,
      peg_capture_radius: 0.008,
      ring_circle_radius: 0.012,
      ring_rest_height: 0.005,
      grasp_radius: 0.006,
      jaw_close_threshold: 0.7,
      jaw_open_threshold: 0.3,
      placement_height_margin: 0.02,
      respawn_delay_s: 1.0,
      tick_dt: 0.01,
      require_handover: true,
    },
    protocol: { familiarization_s: 300, trial_s: 180, trials: 3, break_s: 60 },
    teleop: { translation_scale: 0.5, camera_translation_scale: 1.0 },
    instruments: {
      "0": { rotation: DOWN_QUAT, translation: [-0.06, 0.12, 0] },
      "1": { rotation: DOWN_QUAT, translation: [0.06, 0.12, 0] },
    },
  };
}

export function homeInstrument(id: number): InstrumentSnapshot {
  return {
    id,
    joints: [0, 0, 0.10, 0, 0, 0],
    tip: {
      rotation: DOWN_QUAT,
      translation: [id === 0 ? -0.06 : 0.06, 0.011, 0],
    },
    jaw: 0,
  };
}

export function ringOnPeg(id: number, x: number, z: number): RingSnapshot {
  return {
    id,
    state: "on_peg",
    pose: identityPose([x, 0.005, z]),
    peg: id,
  };
}

export function idleSnapshot(): StateMsg {
  const leftPegs: [number, number][] = [];
  for (const x of [-0.09, -0.05]) for (const z of [-0.04, 0, 0.04]) leftPegs.push([x, z]);
  return {
    type: "state",
    t_us: 40_000,
    mode: "normal",
    phase: { name: "idle", trial_index: null, elapsed_s: 0, duration_s: null },
    instruments: [homeInstrument(0), homeInstrument(1)],
    rings: leftPegs.map(([x, z], i) => ringOnPeg(i, x, z)),
    camera: identityPose([0, 0.25, 0.35]),
  };
}
