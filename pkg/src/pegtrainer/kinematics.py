"""Kinematics of a 6-joint pivot-constrained laparoscopic-style instrument.

The chain, expressed in the pivot (trocar) frame whose +Z points into the
workspace at home:

    yaw about Y, pitch about X, insertion along Z, shaft roll about Z,
    wrist pitch about X, wrist yaw about Y, then a fixed tip offset along Z.

All joints rotate about axes through the pivot or the wrist point, so the
shaft line passes through the pivot for every joint vector; the trocar
constraint is structural rather than enforced numerically.

The inverse solver is damped least squares with three robustness refinements
(all deterministic): position error rows are weighted to balance meters
against radians, damping shrinks proportionally to the remaining error (the
configured lambda is the ceiling), and a stall triggers one analytic re-seed
(shaft pointed at the target, wrist set by Euler extraction) within the same
iteration budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .math3d import RigidTransform, quat_from_matrix, quat_to_matrix, wrap_angle

DEFAULT_JOINT_LIMITS = np.array(
    [
        [-np.pi / 3, np.pi / 3],   # q1 yaw
        [-np.pi / 3, np.pi / 3],   # q2 pitch
        [0.0, 0.25],               # q3 insertion, meters
        [-np.pi, np.pi],           # q4 shaft roll (full circle)
        [-np.pi / 2, np.pi / 2],   # q5 wrist pitch
        [-np.pi / 2, np.pi / 2],   # q6 wrist yaw
    ]
)
DEFAULT_TIP_LENGTH = 0.009
JAW_LIMITS = (0.0, np.deg2rad(60.0))
HOME = np.array([0.0, 0.0, 0.10, 0.0, 0.0, 0.0])


class ReachabilityError(ValueError):
    """Target lies outside the instrument workspace sphere."""


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


@dataclass(frozen=True)
class InstrumentModel:
    rcm_pose: RigidTransform
    joint_limits: np.ndarray = field(default_factory=lambda: DEFAULT_JOINT_LIMITS.copy())
    tip_length: float = DEFAULT_TIP_LENGTH

    def __post_init__(self):
        lim = np.asarray(self.joint_limits, dtype=float)
        if lim.shape != (6, 2) or np.any(lim[:, 0] >= lim[:, 1]):
            raise ValueError("joint_limits must be 6 rows of lo < hi")
        if self.tip_length <= 0:
            raise ValueError("tip_length must be positive")
        object.__setattr__(self, "joint_limits", lim)

    @property
    def workspace_radius(self) -> float:
        return float(self.joint_limits[2, 1] + self.tip_length)


@dataclass
class IkConfig:
    damping: float = 0.05           # damping ceiling (lambda)
    step_clamp_rad: float = 0.2     # per-iteration clamp, revolute joints
    step_clamp_m: float = 0.02      # per-iteration clamp, insertion
    tol_pos_m: float = 1e-4
    tol_rot_rad: float = 1e-3
    max_iters: int = 50
    pos_weight: float = 10.0        # meters-vs-radians balance in the error metric
    stall_iters: int = 5            # no-progress window before the one re-seed


DEFAULT_IK = IkConfig()


@dataclass(frozen=True)
class IkResult:
    q: np.ndarray
    converged: bool
    pos_err_m: float
    rot_err_rad: float
    iterations: int


def clamp_joints(model: InstrumentModel, q) -> np.ndarray:
    """Limits enforcement; the full-circle roll joint wraps instead of clipping."""
    q = np.asarray(q, dtype=float).copy()
    lim = model.joint_limits
    for i in (0, 1, 2, 4, 5):
        q[i] = min(max(q[i], lim[i, 0]), lim[i, 1])
    q[3] = wrap_angle(q[3])
    return q


def clamp_jaw(jaw: float) -> float:
    return float(min(max(jaw, JAW_LIMITS[0]), JAW_LIMITS[1]))


def within_limits(model: InstrumentModel, q, tol: float = 1e-12) -> bool:
    lim = model.joint_limits
    return bool(np.all(q >= lim[:, 0] - tol) and np.all(q <= lim[:, 1] + tol))


def _chain(model: InstrumentModel, q):
    """Joint axes/origins and the tip frame, all in world coordinates."""
    r0 = quat_to_matrix(model.rcm_pose.rotation)
    pivot = model.rcm_pose.translation
    a1 = r0[:, 1]
    r1 = r0 @ _ry(q[0])
    a2 = r1[:, 0]
    r2 = r1 @ _rx(q[1])
    shaft = r2[:, 2]
    wrist = pivot + shaft * q[2]
    r3 = r2 @ _rz(q[3])
    r4 = r3 @ _rx(q[4])
    a5 = r3[:, 0]
    r5 = r4 @ _ry(q[5])
    a6 = r4[:, 1]
    tip = wrist + r5 @ np.array([0.0, 0.0, model.tip_length])
    axes = ((a1, pivot), (a2, pivot), (shaft, None), (shaft, pivot), (a5, wrist), (a6, wrist))
    return tip, r5, wrist, shaft, axes


def forward_kinematics(model: InstrumentModel, q) -> RigidTransform:
    q = np.asarray(q, dtype=float)
    if not within_limits(model, q, tol=1e-9):
        raise ValueError("joint vector outside limits")
    tip, r5, _, _, _ = _chain(model, q)
    return RigidTransform(quat_from_matrix(r5), tip)


def wrist_point(model: InstrumentModel, q) -> np.ndarray:
    _, _, wrist, _, _ = _chain(model, np.asarray(q, dtype=float))
    return wrist


def jacobian(model: InstrumentModel, q) -> np.ndarray:
    """Geometric Jacobian: rows 0-2 linear (m), rows 3-5 angular (rad)."""
    q = np.asarray(q, dtype=float)
    tip, _, _, _, axes = _chain(model, q)
    j = np.zeros((6, 6))
    for i, (axis, origin) in enumerate(axes):
        if origin is None:  # prismatic
            j[:3, i] = axis
        else:
            j[:3, i] = np.cross(axis, tip - origin)
            j[3:, i] = axis
    return j


def rcm_residual(model: InstrumentModel, q) -> float:
    """Distance from the pivot point to the instrument shaft line."""
    q = np.asarray(q, dtype=float)
    _, _, wrist, shaft, _ = _chain(model, q)
    rel = model.rcm_pose.translation - wrist
    return float(np.linalg.norm(rel - np.dot(rel, shaft) * shaft))


def _rot_error_vec(r_target: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Axis-angle of r_target r^T."""
    m = r_target @ r.T
    c = np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0)
    angle = np.arccos(c)
    if angle < 1e-12:
        return np.zeros(3)
    if angle > np.pi - 1e-6:
        w, v = np.linalg.eigh(m)
        axis = v[:, int(np.argmin(np.abs(w - 1.0)))]
        return axis * angle
    vec = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    return vec * (angle / (2.0 * np.sin(angle)))


def _pointing_seed(model: InstrumentModel, p_target, r_target) -> np.ndarray:
    """Analytic initializer: point the shaft at the target, extract the wrist."""
    r0 = quat_to_matrix(model.rcm_pose.rotation)
    rel = p_target - model.rcm_pose.translation
    dist = np.linalg.norm(rel)
    d = r0.T @ (rel / dist)  # desired shaft direction in the pivot frame
    lim = model.joint_limits
    q2 = np.arcsin(np.clip(-d[1], -1.0, 1.0))
    q1 = np.arctan2(d[0], d[2])
    q1 = min(max(q1, lim[0, 0]), lim[0, 1])
    q2 = min(max(q2, lim[1, 0]), lim[1, 1])
    q3 = min(max(dist - model.tip_length, lim[2, 0]), lim[2, 1])
    r_shaft = r0 @ _ry(q1) @ _rx(q2)
    m = r_shaft.T @ r_target  # = Rz(q4) Rx(q5) Ry(q6)
    q5 = np.arcsin(np.clip(m[2, 1], -1.0, 1.0))
    if abs(m[2, 1]) < 1.0 - 1e-9:
        q4 = np.arctan2(-m[0, 1], m[1, 1])
        q6 = np.arctan2(-m[2, 0], m[2, 2])
    else:  # wrist gimbal: fold q6 into q4
        q4 = np.arctan2(m[1, 0], m[0, 0])
        q6 = 0.0
    return clamp_joints(model, np.array([q1, q2, q3, q4, q5, q6]))


def solve_ik(model: InstrumentModel, target: RigidTransform, seed,
             config: IkConfig = DEFAULT_IK) -> IkResult:
    """Damped least squares toward a world tip pose.

    Deterministic: identical (model, target, seed, config) always produces
    the identical result. On a cap hit the best joints found are returned
    with converged=False so the caller can hold its previous state.
    """
    p_target = target.translation
    r_target = quat_to_matrix(target.rotation)
    dist = float(np.linalg.norm(p_target - model.rcm_pose.translation))
    if dist > model.workspace_radius:
        raise ReachabilityError(
            f"target {dist:.3f} m from pivot exceeds workspace radius "
            f"{model.workspace_radius:.3f} m"
        )

    q = clamp_joints(model, seed)
    weights = np.array([config.pos_weight] * 3 + [1.0] * 3)
    clamp = np.array(
        [config.step_clamp_rad] * 2 + [config.step_clamp_m] + [config.step_clamp_rad] * 3
    )
    best_metric = np.inf      # best metric ever seen, for the returned joints
    stall_ref = np.inf        # reference the stall counter measures progress against
    best = None
    no_progress = 0
    reseeded = False

    for it in range(config.max_iters + 1):
        tip, r5, _, _, axes = _chain(model, q)
        e = np.concatenate([p_target - tip, _rot_error_vec(r_target, r5)])
        pos_err = float(np.linalg.norm(e[:3]))
        rot_err = float(np.linalg.norm(e[3:]))
        metric = float(np.linalg.norm(weights * e))
        if metric < best_metric:
            best_metric = metric
            best = (q.copy(), pos_err, rot_err)
        if pos_err < config.tol_pos_m and rot_err < config.tol_rot_rad:
            return IkResult(q=q, converged=True, pos_err_m=pos_err, rot_err_rad=rot_err,
                            iterations=it)
        if it == config.max_iters:
            break

        if metric < stall_ref * (1.0 - 1e-3):
            stall_ref = metric
            no_progress = 0
        else:
            no_progress += 1
            if no_progress >= config.stall_iters and not reseeded:
                q = _pointing_seed(model, p_target, r_target)
                reseeded = True
                stall_ref = np.inf
                no_progress = 0
                continue

        j = np.zeros((6, 6))
        for i, (axis, origin) in enumerate(axes):
            if origin is None:
                j[:3, i] = axis
            else:
                j[:3, i] = np.cross(axis, tip - origin)
                j[3:, i] = axis
        jw = weights[:, None] * j
        ew = weights * e
        lam2 = min(config.damping, metric) ** 2 + 1e-8
        dq = jw.T @ np.linalg.solve(jw @ jw.T + lam2 * np.eye(6), ew)
        dq = np.clip(dq, -clamp, clamp)
        q = clamp_joints(model, q + dq)

    q_best, pos_err, rot_err = best
    return IkResult(q=q_best, converged=False, pos_err_m=pos_err, rot_err_rad=rot_err,
                    iterations=config.max_iters)


def default_instruments() -> dict[int, InstrumentModel]:
    """Two mirrored instruments over the board, shafts pointing down."""
    down = quat_from_matrix(_rx(np.pi / 2))  # +Z of the pivot frame = world -Y
    return {
        0: InstrumentModel(RigidTransform(down, np.array([-0.06, 0.12, 0.0]))),
        1: InstrumentModel(RigidTransform(down, np.array([0.06, 0.12, 0.0]))),
    }
