"""Synthetic sensor sessions and synthetic users.

The sensor side generates controller trajectories (parametric scenarios),
projects the IR marker through both cameras into blob records (or rendered
PGM frames), and synthesizes IMU samples that are exactly consistent with
the ground-truth orientation: the gyro carried by the sample at t_k is the
constant body rate that moves q_{k-1} to q_k, so integrating the noiseless
stream reproduces the truth to float precision. Accelerometer samples are
gravity expressed in the body frame plus noise. Everything is reproducible
from one 64-bit seed.

The synthetic-user side is a closed-loop waypoint policy that plays the
transfer task at a configurable skill level (speed, settling time, fumble
probability), used to produce whole sessions with controlled metric trends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blobs import render_spot, write_pgm
from .calib import Calibration, default_calibration
from .math3d import (
    RigidTransform,
    quat_conjugate,
    quat_identity,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_axis_angle,
)
from .pegtask import GRAVITY, PegTransferTask, RingStateKind, TaskConfig
from .replay import BlobsRecord, FramesRecord, ImuRecord, merge_streams
from .trial import SessionReport, TrialProtocol, TrialReport, run_session, run_trial

DEFAULT_FRAME_RATE_HZ = 60.0
DEFAULT_IMU_RATE_HZ = 100.0
DEFAULT_DURATION_S = 10.0


class GenerationError(ValueError):
    """Trajectory left the camera frustum or could not be synthesized."""


@dataclass(frozen=True)
class NoiseSpec:
    blob_px: float = 0.0                 # Gaussian sigma per pixel coordinate
    gyro_rad_s: float = 0.0
    accel_m_s2: float = 0.0
    gyro_bias_rad_s: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TruthRecord:
    t_us: int
    controller: int
    position: tuple[float, float, float]      # tracker (rig) frame
    orientation: tuple[float, float, float, float]  # body -> world


def _truth_to_json(rec: TruthRecord) -> dict:
    return {
        "kind": "truth", "t_us": rec.t_us, "controller": rec.controller,
        "position": list(rec.position), "orientation": list(rec.orientation),
    }


def write_truth(records, path) -> None:
    import json
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(json.dumps(_truth_to_json(rec), separators=(",", ":")) + "\n")


def read_truth(path) -> list[TruthRecord]:
    import json
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj.get("kind") != "truth":
            raise ValueError(f"not a truth record: {obj.get('kind')!r}")
        out.append(TruthRecord(
            t_us=int(obj["t_us"]), controller=int(obj["controller"]),
            position=tuple(float(v) for v in obj["position"]),
            orientation=tuple(float(v) for v in obj["orientation"]),
        ))
    return out


# ---- scenarios: t (s), controller -> (tracker-frame position, world orientation) ----

def _static_pose(t: float, controller: int):
    x = -0.05 if controller == 0 else 0.05
    return np.array([x, 0.0, 0.30]), quat_identity()


def _circle_pose(t: float, controller: int):
    # camera-facing orbits, radius 0.1 m at 0.5 Hz, slightly tilted in depth
    # so the projected tracks are ellipses; antiphase keeps the hands apart,
    # phased so controller 0 starts on the left (the start-posture rule the
    # tracker's identity assignment depends on)
    center = np.array([-0.045, -0.03, 0.30]) if controller == 0 \
        else np.array([0.045, 0.03, 0.30])
    theta = 2.0 * math.pi * 0.5 * t + (math.pi if controller == 0 else 0.0)
    tilt = 0.26
    pos = center + 0.1 * np.array(
        [math.cos(theta), math.sin(theta) * math.cos(tilt),
         math.sin(theta) * math.sin(tilt)]
    )
    # slow wrist wobble so the gyro stream is non-trivial
    yaw = 0.4 * math.sin(2.0 * math.pi * 0.25 * t)
    pitch = 0.3 * math.sin(2.0 * math.pi * 0.20 * t + controller)
    qy = np.array([math.cos(yaw / 2), 0.0, math.sin(yaw / 2), 0.0])
    qx = np.array([math.cos(pitch / 2), math.sin(pitch / 2), 0.0, 0.0])
    return pos, quat_normalize(quat_multiply(qy, qx))


SCENARIOS = {"static": _static_pose, "circle": _circle_pose}


def _times_us(rate_hz: float, duration_s: float) -> list[int]:
    n = int(round(duration_s * rate_hz))
    return [int(round(k * 1e6 / rate_hz)) for k in range(n + 1)]


def _body_rate(q_prev, q_next, dt: float) -> np.ndarray:
    axis, angle = quat_to_axis_angle(
        quat_normalize(quat_multiply(quat_conjugate(q_prev), q_next))
    )
    return axis * (angle / dt)


def synth_session(scenario: str, calib: Calibration | None = None,
                  noise: NoiseSpec = NoiseSpec(), seed: int = 0,
                  duration_s: float = DEFAULT_DURATION_S,
                  frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ,
                  imu_rate_hz: float = DEFAULT_IMU_RATE_HZ,
                  render_dir=None):
    """Generate (replay records, truth records) for a named scenario.

    With render_dir set, frames are rendered to PGM files there and the
    replay carries frame records instead of blob records.
    """
    if scenario not in SCENARIOS:
        raise GenerationError(
            f"unknown scenario {scenario!r}, available: {sorted(SCENARIOS)}"
        )
    pose_fn = SCENARIOS[scenario]
    calib = calib if calib is not None else default_calibration()
    rng = np.random.default_rng(seed)
    cameras = (calib.left, calib.right)

    frame_times = _times_us(frame_rate_hz, duration_s)
    imu_times = _times_us(imu_rate_hz, duration_s)

    frame_records = []
    if render_dir is not None:
        render_dir = Path(render_dir)
        render_dir.mkdir(parents=True, exist_ok=True)
    for idx, t_us in enumerate(frame_times):
        t = t_us * 1e-6
        pixels = {0: [], 1: []}  # per camera
        for controller in (0, 1):
            pos, _ = pose_fn(t, controller)
            for ci, cam in enumerate(cameras):
                u, v = cam.project(pos)
                if not cam.in_frame(u, v):
                    raise GenerationError(
                        f"trajectory leaves the {'left' if ci == 0 else 'right'} "
                        f"camera frustum at t_us={t_us} (controller {controller})"
                    )
                if noise.blob_px > 0.0:
                    u += noise.blob_px * rng.standard_normal()
                    v += noise.blob_px * rng.standard_normal()
                pixels[ci].append((u, v))
        if render_dir is None:
            frame_records.append(BlobsRecord(
                t_us=t_us, left=tuple(pixels[0]), right=tuple(pixels[1])
            ))
        else:
            names = []
            for ci, cam in enumerate(cameras):
                img = np.zeros((cam.height, cam.width), dtype=np.uint8)
                for u, v in pixels[ci]:
                    # sigma wide enough that a threshold-100 detection keeps
                    # the centroid within 0.3 px of the projection
                    render_spot(img, u, v, sigma_px=1.5)
                name = f"{'left' if ci == 0 else 'right'}_{idx:06d}.pgm"
                write_pgm(render_dir / name, img)
                names.append(name)
            frame_records.append(FramesRecord(
                t_us=t_us,
                left_path=f"{render_dir.name}/{names[0]}",
                right_path=f"{render_dir.name}/{names[1]}",
            ))

    imu_records = []
    for controller in (0, 1):
        bias = np.asarray(noise.gyro_bias_rad_s, dtype=float)
        prev_q = None
        prev_t = None
        for t_us in imu_times:
            t = t_us * 1e-6
            _, q = pose_fn(t, controller)
            if prev_q is None:
                gyro = np.zeros(3)
            else:
                gyro = _body_rate(prev_q, q, (t_us - prev_t) * 1e-6)
            gyro = gyro + bias
            if noise.gyro_rad_s > 0.0:
                gyro = gyro + noise.gyro_rad_s * rng.standard_normal(3)
            accel = quat_rotate(quat_conjugate(q), np.array([0.0, GRAVITY, 0.0]))
            if noise.accel_m_s2 > 0.0:
                accel = accel + noise.accel_m_s2 * rng.standard_normal(3)
            imu_records.append(ImuRecord(
                t_us=t_us, controller=controller,
                gyro=tuple(float(v) for v in gyro),
                accel=tuple(float(v) for v in accel),
            ))
            prev_q, prev_t = q, t_us

    truth = []
    seen = set()
    for t_us in sorted(set(frame_times) | set(imu_times)):
        t = t_us * 1e-6
        for controller in (0, 1):
            if (t_us, controller) in seen:
                continue
            seen.add((t_us, controller))
            pos, q = pose_fn(t, controller)
            truth.append(TruthRecord(
                t_us=t_us, controller=controller,
                position=tuple(float(v) for v in pos),
                orientation=tuple(float(v) for v in q),
            ))

    records = merge_streams(
        sorted(imu_records, key=lambda r: r.t_us), frame_records
    )
    return records, truth


# ---- synthetic user: a closed-loop waypoint policy over the task ----

@dataclass(frozen=True)
class SkillParams:
    move_speed_m_s: float = 0.08    # tip speed between waypoints
    settle_ticks: int = 10          # pause after reaching each waypoint
    fumble_prob: float = 0.0        # chance to drop the ring mid-carry

    def __post_init__(self):
        if self.move_speed_m_s <= 0 or self.settle_ticks < 0:
            raise ValueError("speed must be positive and settle_ticks >= 0")
        if not 0.0 <= self.fumble_prob <= 1.0:
            raise ValueError("fumble_prob must be a probability")


_GRIP = np.array([0.012, 0.0, 0.0])
_MID = np.array([0.0, 0.06, 0.0])
_PARK = {0: np.array([-0.11, 0.10, 0.08]), 1: np.array([0.11, 0.10, 0.08])}


class SyntheticUser:
    """Plays bimanual transfers left-to-right (then back) at a skill level.

    Reads the live task state each tick and emits exact tip commands, so
    respawns and fumbles are handled naturally. All randomness (fumble
    draws, fumble points) comes from the seeded generator.
    """

    def __init__(self, task: PegTransferTask, skill: SkillParams, seed: int = 0):
        self.task = task
        self.skill = skill
        self.rng = np.random.default_rng(seed)
        self.tips = {
            iid: inst.tip_pose.translation.copy()
            for iid, inst in task.instruments.items()
        }
        self.jaws = {0: 0.0, 1: 0.0}
        self._plan = None
        self._step_index = 0
        self._settle_left = 0

    # a plan is a list of (instrument_id, waypoint, jaw_after_arrival)
    def _next_plan(self):
        task = self.task
        resting = [r for r in task.rings if r.kind == RingStateKind.ON_PEG]
        if not resting:
            return None  # everything mid-air or respawning: hold position
        # work the fuller side so rings flow across in waves, not ping-pong
        left_count = sum(
            1 for r in resting if task.pegs[r.peg_id].side == "left"
        )
        src_side = "left" if left_count >= len(resting) - left_count else "right"
        source = next(
            (r for r in resting if task.pegs[r.peg_id].side == src_side), None
        )
        if source is None:
            return None
        picker, placer = (0, 1) if src_side == "left" else (1, 0)
        dest = next(
            p for p in task.pegs
            if p.side != src_side and not any(
                r.kind == RingStateKind.ON_PEG and r.peg_id == p.peg_id
                for r in task.rings
            )
        )
        c = source.pose.translation
        grip = _GRIP if picker == 0 else -_GRIP
        mid_pick = _MID + grip
        mid_place = _MID - grip
        plan = [
            (picker, c + grip + [0.0, 0.04, 0.0], None),
            (picker, c + grip, 1.0),                      # grasp
            (picker, c + grip + [0.0, 0.05, 0.0], None),
            (picker, mid_pick, None),
            (placer, mid_place, 1.0),                     # both jaws on: handover
            (picker, mid_pick, 0.0),                      # picker lets go
            (picker, _PARK[picker], None),
            (placer, [dest.x - grip[0], 0.012, dest.z], 0.0),  # place
            (placer, _PARK[placer], None),
        ]
        if self.rng.random() < self.skill.fumble_prob:
            # replace the placement with an early mid-air release off-peg
            drop_at = np.array([0.0, 0.05, 0.03]) - grip
            plan[7] = (placer, drop_at, 0.0)
        return plan

    def tick(self) -> dict:
        """Advance the policy one tick; returns tip commands for sim_step."""
        if self._plan is None:
            self._plan = self._next_plan()
            self._step_index = 0
            self._settle_left = 0
        commands = {}
        if self._plan is not None and self._step_index < len(self._plan):
            iid, waypoint, jaw_after = self._plan[self._step_index]
            waypoint = np.asarray(waypoint, dtype=float)
            tip = self.tips[iid]
            delta = waypoint - tip
            dist = float(np.linalg.norm(delta))
            step = self.skill.move_speed_m_s * self.task.config.tick_dt
            if dist > step:
                self.tips[iid] = tip + delta * (step / dist)
            else:
                self.tips[iid] = waypoint.copy()
                if self._settle_left == 0:
                    self._settle_left = self.skill.settle_ticks + 1
                self._settle_left -= 1
                if self._settle_left == 0:
                    if jaw_after is not None:
                        self.jaws[iid] = jaw_after
                    self._step_index += 1
                    if self._step_index >= len(self._plan):
                        self._plan = None
        for iid in self.tips:
            commands[iid] = (
                RigidTransform(quat_identity(), self.tips[iid].copy()),
                self.jaws[iid],
            )
        return commands

    def stream(self):
        while True:
            yield self.tick()


def synthetic_user_trial(skill: SkillParams, seed: int = 0,
                         protocol: TrialProtocol = TrialProtocol(),
                         config: TaskConfig = TaskConfig(),
                         trial_id: int = 0) -> TrialReport:
    task = PegTransferTask(config)
    user = SyntheticUser(task, skill, seed=seed)
    return run_trial(task, user.stream(), protocol, trial_id=trial_id)


IMPROVING_LADDER = (
    SkillParams(move_speed_m_s=0.06, settle_ticks=20, fumble_prob=0.45),
    SkillParams(move_speed_m_s=0.09, settle_ticks=10, fumble_prob=0.20),
    SkillParams(move_speed_m_s=0.12, settle_ticks=5, fumble_prob=0.0),
)


def synthetic_user_session(skills=IMPROVING_LADDER, seed: int = 42,
                           protocol: TrialProtocol = TrialProtocol(),
                           config: TaskConfig = TaskConfig()) -> SessionReport:
    """Full multi-trial session played by one synthetic user per trial.

    skills[k] drives trial k; trial k's user is seeded with seed + k. The
    default ladder models practice: faster, less hesitant, fewer fumbles.
    """
    if len(skills) != protocol.trials:
        raise ValueError(
            f"protocol expects {protocol.trials} skill levels, got {len(skills)}"
        )
    tasks: list[PegTransferTask] = []

    def factory():
        tasks.append(PegTransferTask(config))
        return tasks[-1]

    def lazy_stream(k, skill):
        # bind the user on the first tick, after the factory made task k
        user = SyntheticUser(tasks[k], skill, seed=seed + k)
        while True:
            yield user.tick()

    streams = [lazy_stream(k, s) for k, s in enumerate(skills)]
    return run_session(factory, streams, protocol)
