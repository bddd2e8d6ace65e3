"""Orientation-only complementary filter for a gyro + accelerometer unit.

Gyro rates are integrated every sample; when the accelerometer reads a
plausibly static specific force (norm within [0.5 g, 1.5 g]) the estimate is
nudged toward gravity alignment by a small fraction of the tilt error. The
correction is built so the world-frame heading (rotation about world +Y) is
left exactly untouched: heading is unobservable without a magnetometer and
is allowed to drift at gyro-bias rate.

Convention: quaternions map body to world; a stationary, level unit reads
specific force (0, +9.81, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .math3d import (
    quat_conjugate,
    quat_from_axis_angle,
    quat_integrate,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_twist_about,
)

G = 9.81
ACCEL_GATE = (0.5 * G, 1.5 * G)
DEFAULT_ALPHA = 0.02
_WORLD_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class ImuSample:
    t_us: int
    gyro: np.ndarray   # rad/s, body frame
    accel: np.ndarray  # m/s^2, specific force, body frame


class InitializationError(ValueError):
    """Sample unusable for orientation bootstrap."""


def _accel_static(accel) -> bool:
    n = float(np.linalg.norm(accel))
    return ACCEL_GATE[0] < n < ACCEL_GATE[1]


def _tilt_fraction(q, accel_unit, fraction: float):
    """Rotate q toward gravity alignment by `fraction` of the tilt error,
    preserving the world-Y twist of q exactly."""
    twist = quat_twist_about(q, _WORLD_UP)
    swing = quat_multiply(quat_conjugate(twist), q)

    up_est = quat_rotate(swing, accel_unit)
    c = float(np.clip(np.dot(up_est, _WORLD_UP), -1.0, 1.0))
    angle = float(np.arccos(c))
    if angle < 1e-12:
        return q
    axis = np.cross(up_est, _WORLD_UP)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        # estimated up exactly inverted: correct about any horizontal axis
        axis, n = np.array([1.0, 0.0, 0.0]), 1.0
    corr = quat_from_axis_angle(axis / n, fraction * angle)
    swing = quat_multiply(corr, swing)
    # the corrected swing may pick up a parasitic world-Y component; strip it
    parasitic = quat_twist_about(swing, _WORLD_UP)
    swing = quat_multiply(quat_conjugate(parasitic), swing)
    return quat_normalize(quat_multiply(twist, swing))


class OrientationFilter:
    """Complementary filter state for one controller."""

    def __init__(self, q, alpha: float = DEFAULT_ALPHA, last_t_us: int = 0):
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {alpha}")
        self.q = quat_normalize(q)
        self.alpha = alpha
        self.last_t_us = int(last_t_us)

    def step(self, sample: ImuSample) -> np.ndarray:
        """Advance by one sample; non-monotonic timestamps are dropped.

        Gaps longer than 0.1 s are treated as dropouts: the state holds and
        time re-anchors at the sample.
        """
        if sample.t_us <= self.last_t_us:
            return self.q.copy()
        dt = (sample.t_us - self.last_t_us) * 1e-6
        self.last_t_us = sample.t_us
        if dt > 0.1:
            return self.q.copy()
        self.q = quat_integrate(self.q, sample.gyro, dt)
        if self.alpha > 0.0 and _accel_static(sample.accel):
            accel = np.asarray(sample.accel, dtype=float)
            self.q = _tilt_fraction(self.q, accel / np.linalg.norm(accel), self.alpha)
        return self.q.copy()


def init_from_accel(sample: ImuSample, alpha: float = DEFAULT_ALPHA) -> OrientationFilter:
    """Bootstrap orientation from a quasi-static accel reading, heading zero.

    The result is the minimal rotation aligning the measured specific-force
    direction with world up; minimal means no rotation about world +Y.
    """
    accel = np.asarray(sample.accel, dtype=float)
    if not _accel_static(accel):
        raise InitializationError(
            f"accel norm {np.linalg.norm(accel):.2f} m/s^2 not quasi-static"
        )
    a = accel / np.linalg.norm(accel)
    # body->world must map the measured body-frame up direction to world up
    c = float(np.clip(np.dot(a, _WORLD_UP), -1.0, 1.0))
    if c > 1.0 - 1e-12:
        q = np.array([1.0, 0.0, 0.0, 0.0])
    elif c < -1.0 + 1e-12:
        q = quat_from_axis_angle(np.array([1.0, 0.0, 0.0]), np.pi)
    else:
        axis = np.cross(a, _WORLD_UP)
        q = quat_from_axis_angle(axis / np.linalg.norm(axis), float(np.arccos(c)))
    return OrientationFilter(q, alpha=alpha, last_t_us=sample.t_us)
