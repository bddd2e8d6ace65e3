/** Forward kinematics of the 6-joint pivot-constrained instrument, ported
 *  from the engine so drawn instruments match server tip poses.
 *
 *  Chain in the pivot frame (+Z into the workspace at home): yaw about Y,
 *  pitch about X, insertion along Z, shaft roll about Z, wrist pitch about X,
 *  wrist yaw about Y, then a fixed tip offset along Z.
 */

import {
  Mat3, Quat, Vec3,
  matCol, matMul, matMulVec, quatFromMatrix, quatToMatrix,
  rotX, rotY, rotZ, vecAdd, vecScale,
} from "./math3d";

/** Tip offset is a chain constant, not part of the wire scene document. */
export const TIP_LENGTH = 0.009;

export interface InstrumentModel {
  rcmRotation: Quat;
  rcmTranslation: Vec3;
  tipLength: number;
}

export interface ChainFrames {
  pivot: Vec3;
  /** Unit vector from the pivot along the inserted shaft. */
  shaft: Vec3;
  wrist: Vec3;
  tip: Vec3;
  tipRotation: Quat;
  /** Tip frame as a matrix, for drawing the jaw prongs. */
  tipMatrix: Mat3;
}

export function instrumentFromPose(rotation: Quat, translation: Vec3,
                                   tipLength = TIP_LENGTH): InstrumentModel {
  return { rcmRotation: rotation, rcmTranslation: translation, tipLength };
}

export function chainFrames(model: InstrumentModel, q: number[]): ChainFrames {
  if (q.length !== 6) throw new Error(`expected 6 joints, got ${q.length}`);
  const r0 = quatToMatrix(model.rcmRotation);
  const pivot = model.rcmTranslation;
  const r1 = matMul(r0, rotY(q[0]));
  const r2 = matMul(r1, rotX(q[1]));
  const shaft = matCol(r2, 2);
  const wrist = vecAdd(pivot, vecScale(shaft, q[2]));
  const r3 = matMul(r2, rotZ(q[3]));
  const r4 = matMul(r3, rotX(q[4]));
  const r5 = matMul(r4, rotY(q[5]));
  const tip = vecAdd(wrist, matMulVec(r5, [0, 0, model.tipLength]));
  return {
    pivot,
    shaft,
    wrist,
    tip,
    tipRotation: quatFromMatrix(r5),
    tipMatrix: r5,
  };
}

export function forwardKinematics(model: InstrumentModel, q: number[]):
    { position: Vec3; rotation: Quat } {
  const frames = chainFrames(model, q);
  return { position: frames.tip, rotation: frames.tipRotation };
}
