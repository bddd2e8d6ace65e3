/** three.js scene graph for the peg board, rings, and instruments.
 *
 *  Instruments are drawn from snapshot joint values through the same chain
 *  the engine uses, so the drawn tip lands on the server's tip pose. Ring
 *  meshes are positioned verbatim from snapshot poses and colored by state.
 */

import * as THREE from "three";
import { chainFrames, InstrumentModel, instrumentFromPose } from "./kinematics";
import { Quat, Vec3 } from "./math3d";
import {
  InstrumentSnapshot, RingSnapshot, RingStateName, SceneDoc, StateMsg,
  posePosition, poseQuat,
} from "./protocol";

export const RING_COLORS: Record<RingStateName, number> = {
  on_peg: 0x3b82f6,
  grasped: 0x22c55e,
  grasped_both: 0xa855f7,
  falling: 0xf59e0b,
  respawning: 0x6b7280,
};

/** Default peg layout, mirroring the engine: two columns of three per side. */
export function defaultPegPositions(): { x: number; z: number }[] {
  const left: { x: number; z: number }[] = [];
  for (const x of [-0.09, -0.05]) {
    for (const z of [-0.04, 0.0, 0.04]) left.push({ x, z });
  }
  return left.concat(left.map((p) => ({ x: -p.x, z: p.z })));
}

function threeQuat(q: Quat): THREE.Quaternion {
  return new THREE.Quaternion(q[1], q[2], q[3], q[0]);
}

function threeVec(v: Vec3): THREE.Vector3 {
  return new THREE.Vector3(v[0], v[1], v[2]);
}

/** Unit-height Y cylinder stretched between two world points. */
function placeSegment(mesh: THREE.Mesh, a: Vec3, b: Vec3): void {
  const pa = threeVec(a);
  const pb = threeVec(b);
  const dir = pb.clone().sub(pa);
  const len = dir.length();
  mesh.visible = len > 1e-6;
  if (!mesh.visible) return;
  mesh.position.copy(pa.clone().add(pb).multiplyScalar(0.5));
  mesh.scale.set(1, len, 1);
  mesh.quaternion.setFromUnitVectors(new THREE.Vector3(0, 1, 0), dir.normalize());
}

interface InstrumentMeshes {
  model: InstrumentModel;
  shaftOuter: THREE.Mesh;
  shaftInner: THREE.Mesh;
  tipSegment: THREE.Mesh;
  prongL: THREE.Mesh;
  prongR: THREE.Mesh;
  tipGroup: THREE.Group;
}

const JAW_DRAW_HALF_ANGLE_RAD = 0.5;

export class SceneView {
  readonly scene: THREE.Scene;
  readonly ringMeshes: THREE.Mesh[] = [];
  private ringMaterials: THREE.MeshLambertMaterial[] = [];
  private instruments = new Map<number, InstrumentMeshes>();
  private ringStates: RingStateName[] = [];

  constructor(doc: SceneDoc) {
    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x10141c);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const sun = new THREE.DirectionalLight(0xffffff, 1.6);
    sun.position.set(0.3, 0.8, 0.5);
    this.scene.add(sun);

    const board = new THREE.Mesh(
      new THREE.BoxGeometry(0.26, 0.01, 0.16),
      new THREE.MeshLambertMaterial({ color: 0x2a2f3a }),
    );
    board.position.set(0, -0.005, 0);
    board.name = "board";
    this.scene.add(board);

    const pegMat = new THREE.MeshLambertMaterial({ color: 0xc9a36a });
    const pegH = doc.task.peg_height;
    for (const peg of defaultPegPositions()) {
      const mesh = new THREE.Mesh(
        new THREE.CylinderGeometry(0.0025, 0.0025, pegH, 16), pegMat);
      mesh.position.set(peg.x, pegH / 2, peg.z);
      mesh.name = "peg";
      this.scene.add(mesh);
    }

    // torus lies in its local XY plane; rotate the geometry so an
    // identity-pose ring lies flat on the board
    const ringGeo = new THREE.TorusGeometry(doc.task.ring_circle_radius, 0.0025, 12, 32);
    ringGeo.rotateX(Math.PI / 2);
    for (let i = 0; i < 6; i++) {
      const mat = new THREE.MeshLambertMaterial({ color: RING_COLORS.on_peg });
      const mesh = new THREE.Mesh(ringGeo, mat);
      mesh.name = `ring${i}`;
      this.ringMeshes.push(mesh);
      this.ringMaterials.push(mat);
      this.ringStates.push("on_peg");
      this.scene.add(mesh);
    }

    for (const [key, pose] of Object.entries(doc.instruments)) {
      const id = Number(key);
      const model = instrumentFromPose(poseQuat(pose), posePosition(pose));
      const tone = id === 0 ? 0x9aa7bd : 0xb8a0c9;
      const mat = new THREE.MeshLambertMaterial({ color: tone });
      const shaftOuter = new THREE.Mesh(
        new THREE.CylinderGeometry(0.003, 0.003, 1, 12), mat);
      const shaftInner = new THREE.Mesh(
        new THREE.CylinderGeometry(0.002, 0.002, 1, 12), mat);
      const tipSegment = new THREE.Mesh(
        new THREE.CylinderGeometry(0.0015, 0.0015, 1, 8),
        new THREE.MeshLambertMaterial({ color: 0xe7eaf0 }),
      );
      const prongGeo = new THREE.BoxGeometry(0.0012, 0.0012, 0.006);
      prongGeo.translate(0, 0, 0.003);
      const prongMat = new THREE.MeshLambertMaterial({ color: 0xf3f4f6 });
      const prongL = new THREE.Mesh(prongGeo, prongMat);
      const prongR = new THREE.Mesh(prongGeo, prongMat);
      const tipGroup = new THREE.Group();
      tipGroup.add(prongL);
      tipGroup.add(prongR);
      const pivotBall = new THREE.Mesh(
        new THREE.SphereGeometry(0.005, 12, 12), mat);
      pivotBall.position.copy(threeVec(posePosition(pose)));
      this.scene.add(shaftOuter, shaftInner, tipSegment, tipGroup, pivotBall);
      this.instruments.set(id, {
        model, shaftOuter, shaftInner, tipSegment, prongL, prongR, tipGroup,
      });
    }
  }

  ringState(i: number): RingStateName {
    return this.ringStates[i];
  }

  update(snap: StateMsg): void {
    for (const ring of snap.rings) {
      this.applyRing(ring);
    }
    for (const inst of snap.instruments) {
      this.applyInstrument(inst);
    }
  }

  private applyRing(ring: RingSnapshot): void {
    const mesh = this.ringMeshes[ring.id];
    if (!mesh) return;
    mesh.position.copy(threeVec(posePosition(ring.pose)));
    mesh.quaternion.copy(threeQuat(poseQuat(ring.pose)));
    this.ringStates[ring.id] = ring.state;
    const mat = this.ringMaterials[ring.id];
    mat.color.setHex(RING_COLORS[ring.state] ?? RING_COLORS.on_peg);
    mat.opacity = ring.state === "respawning" ? 0.35 : 1.0;
    mat.transparent = ring.state === "respawning";
  }

  private applyInstrument(inst: InstrumentSnapshot): void {
    const meshes = this.instruments.get(inst.id);
    if (!meshes) return;
    const frames = chainFrames(meshes.model, inst.joints);
    // outer shaft: the part above the trocar, drawn a fixed length back
    const outerTop: Vec3 = [
      frames.pivot[0] - frames.shaft[0] * 0.06,
      frames.pivot[1] - frames.shaft[1] * 0.06,
      frames.pivot[2] - frames.shaft[2] * 0.06,
    ];
    placeSegment(meshes.shaftOuter, outerTop, frames.pivot);
    placeSegment(meshes.shaftInner, frames.pivot, frames.wrist);
    placeSegment(meshes.tipSegment, frames.wrist, frames.tip);
    meshes.tipGroup.position.copy(threeVec(frames.tip));
    meshes.tipGroup.quaternion.copy(threeQuat(frames.tipRotation));
    // jaw value 1 is a closed grasp, so the prongs fold together as it rises
    const half = (1 - inst.jaw) * JAW_DRAW_HALF_ANGLE_RAD;
    meshes.prongL.rotation.set(-half, 0, 0);
    meshes.prongR.rotation.set(half, 0, 0);
  }

  /** Drawn tip position for an instrument, for cross-checks against the
   *  server's tip pose. */
  drawnTip(id: number, joints: number[]): Vec3 {
    const meshes = this.instruments.get(id);
    if (!meshes) throw new Error(`unknown instrument ${id}`);
    return chainFrames(meshes.model, joints).tip;
  }
}
