/** Device input to virtual controller poses.
 *
 *  Mouse deltas (pointer lock) translate the active controller in the camera
 *  plane, the wheel moves it along the view depth, and a held rotate
 *  modifier turns drags into orientation changes. The jaw ramps 0 to 1 over
 *  a fixed time while its key is held and back down when released. A gamepad
 *  integrates stick deflection as a velocity.
 */

import {
  Quat, Vec3, quatFromAxisAngle, quatIdentity, quatMultiply, quatNormalize,
  vecAdd, vecScale,
} from "./math3d";
import { CameraBasis } from "./view";

export interface InputGains {
  /** Meters of controller travel per pixel of mouse motion. */
  translationMPerPx: number;
  /** Radians per pixel while the rotate modifier is held. */
  rotationRadPerPx: number;
  /** Meters along the view axis per wheel delta unit. */
  wheelMPerUnit: number;
  /** Meters per second at full gamepad stick deflection. */
  gamepadMPerS: number;
}

export const DEFAULT_GAINS: InputGains = {
  translationMPerPx: 0.001,
  rotationRadPerPx: 0.005,
  wheelMPerUnit: 0.0002,
  gamepadMPerS: 0.2,
};

export const JAW_RAMP_MS = 150;

export interface VirtualControllerState {
  id: number;
  position: Vec3;
  orientation: Quat;
  button: boolean;
  jaw: number;
}

/** Stick axes and buttons already read from the Gamepad API. */
export interface GamepadSample {
  /** Camera-plane velocity: x right, y up (stick pushed forward = +y). */
  planar: [number, number];
  /** Depth velocity along the view axis, -1..1. */
  depth: number;
  jawHeld: boolean;
}

const CONTROLLER_COUNT = 2;

export class InputMapper {
  gains: InputGains;
  active = 0;
  /** Deadman for pose streaming: nothing is emitted before the first
   *  device event, so an idle page sends no input. */
  dirty = false;

  private controllers: VirtualControllerState[];
  private jawHeld = false;
  private basis: CameraBasis;

  constructor(basis: CameraBasis, gains: InputGains = DEFAULT_GAINS,
              startPositions?: Vec3[]) {
    this.gains = gains;
    this.basis = basis;
    this.controllers = [];
    for (let i = 0; i < CONTROLLER_COUNT; i++) {
      this.controllers.push({
        id: i,
        position: startPositions?.[i] ?? [0, 0, 0],
        orientation: quatIdentity(),
        button: true, // matches the engine: clutched until released
        jaw: 0,
      });
    }
  }

  setCameraBasis(basis: CameraBasis): void {
    this.basis = basis;
  }

  state(id = this.active): VirtualControllerState {
    return this.controllers[id];
  }

  toggleActive(): number {
    this.active = (this.active + 1) % CONTROLLER_COUNT;
    return this.active;
  }

  /** Clutch toggle; true = clutched (instrument holds still). */
  toggleButton(): boolean {
    const c = this.controllers[this.active];
    c.button = !c.button;
    this.dirty = true;
    return c.button;
  }

  setJawHeld(held: boolean): void {
    this.jawHeld = held;
    this.dirty = true;
  }

  /** Pointer-lock mouse delta. Screen right = camera right; screen up
   *  (negative dy) = camera up. With the rotate modifier the same drag
   *  yaws about camera-up and pitches about camera-right. */
  pointerDelta(dxPx: number, dyPx: number, rotate: boolean): void {
    const c = this.controllers[this.active];
    if (rotate) {
      const yaw = quatFromAxisAngle(this.basis.up, -dxPx * this.gains.rotationRadPerPx);
      const pitch = quatFromAxisAngle(this.basis.right, -dyPx * this.gains.rotationRadPerPx);
      c.orientation = quatNormalize(quatMultiply(quatMultiply(yaw, pitch), c.orientation));
    } else {
      const g = this.gains.translationMPerPx;
      c.position = vecAdd(
        c.position,
        vecAdd(vecScale(this.basis.right, dxPx * g), vecScale(this.basis.up, -dyPx * g)),
      );
    }
    this.dirty = true;
  }

  /** Wheel scroll: scrolling up (negative deltaY) pushes deeper into the view. */
  wheel(deltaY: number): void {
    const c = this.controllers[this.active];
    c.position = vecAdd(
      c.position, vecScale(this.basis.forward, -deltaY * this.gains.wheelMPerUnit));
    this.dirty = true;
  }

  /** Per-frame integration: jaw ramp plus optional gamepad velocities. */
  tick(dtMs: number, pad?: GamepadSample): void {
    const c = this.controllers[this.active];
    const step = dtMs / JAW_RAMP_MS;
    const jawClosing = this.jawHeld || (pad?.jawHeld ?? false);
    const jaw = Math.min(1, Math.max(0, c.jaw + (jawClosing ? step : -step)));
    if (jaw !== c.jaw) this.dirty = true;
    c.jaw = jaw;
    if (pad && (pad.planar[0] !== 0 || pad.planar[1] !== 0 || pad.depth !== 0)) {
      const v = this.gains.gamepadMPerS * (dtMs / 1000);
      c.position = vecAdd(c.position, vecAdd(
        vecAdd(vecScale(this.basis.right, pad.planar[0] * v),
               vecScale(this.basis.up, pad.planar[1] * v)),
        vecScale(this.basis.forward, pad.depth * v),
      ));
      this.dirty = true;
    }
  }
}
