/** Camera rig math: posing the render camera from snapshot camera poses and
 *  deriving the two eye cameras for anaglyph stereo.
 *
 *  The snapshot camera pose places a rig whose optic axis is pitched down at
 *  a fixed mount angle chosen so the default perch frames the board center;
 *  the camera itself looks along its local -Z (renderer convention).
 */

import {
  Mat3, Quat, Vec3, matCol, matMul, quatFromMatrix, quatMultiply,
  quatNormalize, quatToMatrix, rotX, vecAdd, vecScale,
} from "./math3d";
import { WirePose, posePosition, poseQuat } from "./protocol";

/** Default perch is (0, 0.25, 0.35) with identity rotation; pitching the
 *  optic axis down by atan2(0.25, 0.35) aims it at the board origin. */
export const MOUNT_PITCH_RAD = -Math.atan2(0.25, 0.35);

export const DEFAULT_EYE_SEPARATION_M = 0.065;

export interface CameraBasis {
  right: Vec3;
  up: Vec3;
  /** View direction (local -Z). */
  forward: Vec3;
}

export interface CameraPose {
  position: Vec3;
  /** World-from-camera rotation, mount tilt already applied. */
  rotation: Quat;
}

const MOUNT_QUAT = quatFromMatrix(rotX(MOUNT_PITCH_RAD));

export function cameraPoseFromSnapshot(pose: WirePose): CameraPose {
  return {
    position: posePosition(pose),
    rotation: quatNormalize(quatMultiply(poseQuat(pose), MOUNT_QUAT)),
  };
}

export function cameraBasis(pose: CameraPose): CameraBasis {
  const m: Mat3 = quatToMatrix(pose.rotation);
  const back = matCol(m, 2);
  return {
    right: matCol(m, 0),
    up: matCol(m, 1),
    forward: [-back[0], -back[1], -back[2]],
  };
}

export interface EyePoses {
  left: CameraPose;
  right: CameraPose;
}

/** Two parallel eye cameras offset half the separation each way along the
 *  rig's right axis, so their projection centers sit `separationM` apart
 *  and average to the cyclopean camera. */
export function eyePoses(pose: CameraPose, separationM = DEFAULT_EYE_SEPARATION_M): EyePoses {
  const right = cameraBasis(pose).right;
  const half = separationM / 2;
  return {
    left: { position: vecAdd(pose.position, vecScale(right, -half)), rotation: pose.rotation },
    right: { position: vecAdd(pose.position, vecScale(right, half)), rotation: pose.rotation },
  };
}

export function mat3FromQuat(q: Quat): Mat3 {
  return quatToMatrix(q);
}

export { matMul };
