/** 3-D math primitives matching the engine's conventions:
 *  world frame right-handed with +Y up, quaternions (w, x, y, z)
 *  canonicalized to w >= 0, rotation matrices row-major 3x3.
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];
/** Row-major 3x3: m[row * 3 + col]. */
export type Mat3 = number[];

export function vecAdd(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function vecSub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function vecScale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function vecDot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function vecCross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function vecNorm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function vecNormalize(a: Vec3): Vec3 {
  const n = vecNorm(a);
  if (n === 0) throw new Error("zero vector");
  return vecScale(a, 1 / n);
}

export function quatIdentity(): Quat {
  return [1, 0, 0, 0];
}

function canonical(q: Quat): Quat {
  return q[0] < 0 ? [-q[0], -q[1], -q[2], -q[3]] : q;
}

export function quatNorm(q: Quat): number {
  return Math.hypot(q[0], q[1], q[2], q[3]);
}

export function quatNormalize(q: Quat): Quat {
  const n = quatNorm(q);
  if (n === 0) throw new Error("zero quaternion");
  return canonical([q[0] / n, q[1] / n, q[2] / n, q[3] / n]);
}

/** Hamilton product a*b (apply b first, then a). */
export function quatMultiply(a: Quat, b: Quat): Quat {
  const [aw, ax, ay, az] = a;
  const [bw, bx, by, bz] = b;
  return [
    aw * bw - ax * bx - ay * by - az * bz,
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
  ];
}

export function quatConjugate(q: Quat): Quat {
  return [q[0], -q[1], -q[2], -q[3]];
}

/** Rotate vector v by quaternion q: v + 2w(u x v) + 2(u x (u x v)). */
export function quatRotate(q: Quat, v: Vec3): Vec3 {
  const w = q[0];
  const u: Vec3 = [q[1], q[2], q[3]];
  const uv = vecCross(u, v);
  const uuv = vecCross(u, uv);
  return [
    v[0] + 2 * (w * uv[0] + uuv[0]),
    v[1] + 2 * (w * uv[1] + uuv[1]),
    v[2] + 2 * (w * uv[2] + uuv[2]),
  ];
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = vecNorm(axis);
  if (Math.abs(n - 1) > 1e-6) throw new Error(`axis must be unit length, got norm ${n}`);
  const half = 0.5 * angle;
  const s = Math.sin(half) / n;
  return canonical([Math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s]);
}

export function quatToMatrix(q: Quat): Mat3 {
  const [w, x, y, z] = q;
  return [
    1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
    2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
    2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y),
  ];
}

/** Rotation matrix to quaternion (Shepperd's method, stable branches). */
export function quatFromMatrix(m: Mat3): Quat {
  const t = m[0] + m[4] + m[8];
  let q: Quat;
  if (t > 0) {
    const s = Math.sqrt(t + 1) * 2;
    q = [0.25 * s, (m[7] - m[5]) / s, (m[2] - m[6]) / s, (m[3] - m[1]) / s];
  } else if (m[0] > m[4] && m[0] > m[8]) {
    const s = Math.sqrt(1 + m[0] - m[4] - m[8]) * 2;
    q = [(m[7] - m[5]) / s, 0.25 * s, (m[1] + m[3]) / s, (m[2] + m[6]) / s];
  } else if (m[4] > m[8]) {
    const s = Math.sqrt(1 + m[4] - m[0] - m[8]) * 2;
    q = [(m[2] - m[6]) / s, (m[1] + m[3]) / s, 0.25 * s, (m[5] + m[7]) / s];
  } else {
    const s = Math.sqrt(1 + m[8] - m[0] - m[4]) * 2;
    q = [(m[3] - m[1]) / s, (m[2] + m[6]) / s, (m[5] + m[7]) / s, 0.25 * s];
  }
  return quatNormalize(q);
}

/** Rotation angle taking a to b, in [0, pi]. */
export function quatAngleBetween(a: Quat, b: Quat): number {
  const d = quatNormalize(quatMultiply(b, quatConjugate(a)));
  const s = Math.hypot(d[1], d[2], d[3]);
  return 2 * Math.atan2(s, d[0]);
}

export function matMulVec(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
  ];
}

export function matMul(a: Mat3, b: Mat3): Mat3 {
  const out = new Array<number>(9);
  for (let r = 0; r < 3; r++) {
    for (let c = 0; c < 3; c++) {
      out[r * 3 + c] =
        a[r * 3] * b[c] + a[r * 3 + 1] * b[3 + c] + a[r * 3 + 2] * b[6 + c];
    }
  }
  return out;
}

export function matCol(m: Mat3, c: number): Vec3 {
  return [m[c], m[3 + c], m[6 + c]];
}

export function rotX(a: number): Mat3 {
  const c = Math.cos(a), s = Math.sin(a);
  return [1, 0, 0, 0, c, -s, 0, s, c];
}

export function rotY(a: number): Mat3 {
  const c = Math.cos(a), s = Math.sin(a);
  return [c, 0, s, 0, 1, 0, -s, 0, c];
}

export function rotZ(a: number): Mat3 {
  const c = Math.cos(a), s = Math.sin(a);
  return [c, -s, 0, s, c, 0, 0, 0, 1];
}
