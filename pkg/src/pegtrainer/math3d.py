"""3-D math primitives: unit quaternions, rigid transforms, pinhole cameras.

Conventions:
  - world frame is right-handed with +Y up
  - camera frames are x-right, y-down, z-forward (optical axis)
  - quaternions are (w, x, y, z) arrays, canonicalized to w >= 0 on output
  - rigid transforms map points from the local frame into the parent frame
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "quat_identity",
    "quat_normalize",
    "quat_multiply",
    "quat_conjugate",
    "quat_rotate",
    "quat_from_axis_angle",
    "quat_to_axis_angle",
    "quat_from_matrix",
    "quat_to_matrix",
    "quat_integrate",
    "quat_angle_between",
    "quat_shortest_arc",
    "quat_twist_about",
    "wrap_angle",
    "RigidTransform",
    "PinholeCamera",
]


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def _canonical(q: np.ndarray) -> np.ndarray:
    # w >= 0 so that q and -q (same rotation) compare equal
    return -q if q[0] < 0.0 else q


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return _canonical(q / n)


def quat_multiply(a, b) -> np.ndarray:
    """Hamilton product a*b (apply b first, then a)."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by quaternion q."""
    w = q[0]
    u = np.asarray(q[1:], dtype=float)
    v = np.asarray(v, dtype=float)
    # q v q* expanded: v + 2w(u x v) + 2(u x (u x v))
    uv = np.cross(u, v)
    return v + 2.0 * w * uv + 2.0 * np.cross(u, uv)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"axis must be unit length, got norm {n}")
    half = 0.5 * angle
    q = np.concatenate(([np.cos(half)], np.sin(half) * axis / n))
    return _canonical(q)


def quat_to_axis_angle(q) -> tuple[np.ndarray, float]:
    """Inverse of quat_from_axis_angle; angle in [0, pi] for canonical q."""
    q = quat_normalize(q)
    s = np.linalg.norm(q[1:])
    if s < 1e-12:
        return np.array([1.0, 0.0, 0.0]), 0.0
    angle = 2.0 * np.arctan2(s, q[0])
    return q[1:] / s, angle


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(m) -> np.ndarray:
    """Rotation matrix to quaternion (Shepperd's method, stable branches)."""
    m = np.asarray(m, dtype=float)
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return quat_normalize(q)


def quat_integrate(q, omega, dt: float) -> np.ndarray:
    """Advance q by body-frame angular rate omega (rad/s) over dt seconds."""
    if dt <= 0 or dt > 0.1:
        raise ValueError(f"dt must be in (0, 0.1], got {dt}")
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega) * dt
    if theta < 1e-12:
        return quat_normalize(q)
    dq = quat_from_axis_angle(omega / np.linalg.norm(omega), theta)
    return quat_normalize(quat_multiply(q, dq))


def quat_angle_between(a, b) -> float:
    """Rotation angle taking a to b, in [0, pi]."""
    d = quat_multiply(b, quat_conjugate(a))
    return quat_to_axis_angle(d)[1]


def quat_shortest_arc(u, v) -> np.ndarray:
    """Minimal rotation taking direction u to direction v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    c = np.dot(u, v)
    if c < -1.0 + 1e-12:
        # antiparallel: pick any axis orthogonal to u
        axis = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-6:
            axis = np.cross(u, [0.0, 1.0, 0.0])
        return quat_from_axis_angle(axis / np.linalg.norm(axis), np.pi)
    xyz = np.cross(u, v)
    q = np.concatenate(([1.0 + c], xyz))
    return quat_normalize(q)


def quat_twist_about(q, axis) -> np.ndarray:
    """Twist factor of q about a world axis: q = twist * swing (left decomposition)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    proj = np.dot(q[1:], axis)
    t = np.array([q[0], *(proj * axis)])
    n = np.linalg.norm(t)
    if n < 1e-12:
        return quat_identity()
    return _canonical(t / n)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = (a + np.pi) % (2.0 * np.pi) - np.pi
    return np.pi if w == -np.pi else w


@dataclass(frozen=True)
class RigidTransform:
    """Rotation (unit quaternion) followed by translation, local -> parent."""

    rotation: np.ndarray = field(default_factory=quat_identity)
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "rotation", quat_normalize(self.rotation))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform()

    def apply(self, p) -> np.ndarray:
        return quat_rotate(self.rotation, p) + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self . other: apply other first, then self."""
        return RigidTransform(
            quat_multiply(self.rotation, other.rotation),
            self.apply(other.translation),
        )

    def inverse(self) -> "RigidTransform":
        inv = quat_conjugate(self.rotation)
        return RigidTransform(inv, -quat_rotate(inv, self.translation))

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = quat_to_matrix(self.rotation)
        m[:3, 3] = self.translation
        return m


@dataclass(frozen=True)
class PinholeCamera:
    """Zero-distortion pinhole camera. pose_in_rig maps camera frame -> rig frame."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    pose_in_rig: RigidTransform = field(default_factory=RigidTransform.identity)

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside image")

    def project(self, p_rig) -> tuple[float, float]:
        """Project a rig-frame point to pixel coordinates (u, v)."""
        p_cam = self.pose_in_rig.inverse().apply(p_rig)
        if p_cam[2] < 1e-6:
            raise ValueError(f"point behind camera (z={p_cam[2]:.6f})")
        u = self.fx * p_cam[0] / p_cam[2] + self.cx
        v = self.fy * p_cam[1] / p_cam[2] + self.cy
        return float(u), float(v)

    def backproject_ray(self, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
        """Pixel -> (origin, unit direction) of the viewing ray, in rig frame."""
        d_cam = np.array([(u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0])
        d_rig = quat_rotate(self.pose_in_rig.rotation, d_cam)
        return self.pose_in_rig.translation.copy(), d_rig / np.linalg.norm(d_rig)

    def in_frame(self, u: float, v: float) -> bool:
        return 0.0 <= u < self.width and 0.0 <= v < self.height
