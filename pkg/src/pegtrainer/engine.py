"""Headless pipeline: replay records to tracks, poses, and trial reports.

The tracking frontend turns a time-ordered replay stream (IMU samples plus
stereo blob records or frame file references) into per-controller tracker
state and fused world poses. The engine wraps a frontend, the clutch mapper,
and the task into a closed loop stepped at the task rate: before each tick
all records due by the tick's start time are consumed, then the mapper turns
the latest fused poses into tip targets for the simulation step. Everything
is deterministic, so one replay file always produces one report.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blobs import Blob, IrFrame, detect_blobs, read_pgm
from .calib import Calibration, default_calibration
from .imu import (
    DEFAULT_ALPHA,
    ImuSample,
    InitializationError,
    OrientationFilter,
    init_from_accel,
)
from .math3d import quat_identity
from .pegtask import Event, PegTransferTask
from .replay import BlobsRecord, FramesRecord, ImuRecord, read_replay
from .sceneconfig import SceneConfig
from .stereo import (
    DegenerateGeometryError,
    GapRejectError,
    correspond_stereo,
    triangulate_midpoint,
)
from .teleop import StalePoseError, Teleop, TipTarget, fuse_pose
from .tracking import (
    DEFAULT_COAST_LIMIT_MS,
    DEFAULT_GATE_MM,
    DEFAULT_WINDOW,
    TrackerBank,
)
from .trial import (
    SessionReport,
    TrialProtocol,
    TrialReport,
    improvement_series,
    run_trial,
)

# matched to the synthetic renderer's spot profile (peak 255, sigma 1.5 px):
# at this threshold the detected centroid stays within 0.3 px of the
# projection; the detector's own default suits harder-contrast footage
FRAME_DECODE_THRESHOLD = 100


@dataclass(frozen=True)
class FrontendConfig:
    blob_threshold: int = FRAME_DECODE_THRESHOLD
    window: int = DEFAULT_WINDOW
    gate_mm: float = DEFAULT_GATE_MM
    coast_limit_ms: float = DEFAULT_COAST_LIMIT_MS
    filter_alpha: float = DEFAULT_ALPHA
    grip_offset: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TrackRow:
    """One controller's tracker state at one frame time."""

    t_us: int
    controller: int
    raw: np.ndarray        # tracker frame, meters
    smoothed: np.ndarray
    orientation: np.ndarray  # world, unit quaternion (identity until IMU init)
    status: str


class TrackingFrontend:
    """Stateful record consumer: stereo frames and IMU in, poses out."""

    def __init__(self, calib: Calibration | None = None,
                 config: FrontendConfig = FrontendConfig(),
                 frames_base=None):
        self.calib = calib if calib is not None else default_calibration()
        self.config = config
        self.rig = self.calib.rig()
        self.bank = TrackerBank(gate_mm=config.gate_mm,
                                coast_limit_ms=config.coast_limit_ms,
                                window=config.window)
        self.filters: dict[int, OrientationFilter | None] = {0: None, 1: None}
        self.buttons: dict[int, bool] = {0: False, 1: False}
        self.jaws: dict[int, float] = {0: 0.0, 1: 0.0}
        self.frames_base = Path(frames_base) if frames_base is not None else Path(".")

    def process(self, record) -> list[TrackRow]:
        """Consume one replay record; frame records yield track rows."""
        if isinstance(record, ImuRecord):
            self._process_imu(record)
            return []
        if isinstance(record, BlobsRecord):
            left = [Blob(u, v, area=1, peak=255) for u, v in record.left]
            right = [Blob(u, v, area=1, peak=255) for u, v in record.right]
            return self._process_stereo(record.t_us, left, right)
        if isinstance(record, FramesRecord):
            left = self._detect(record.left_path, record.t_us)
            right = self._detect(record.right_path, record.t_us)
            return self._process_stereo(record.t_us, left, right)
        raise TypeError(f"unsupported replay record {type(record).__name__}")

    def _detect(self, rel_path: str, t_us: int) -> list[Blob]:
        pixels = read_pgm(self.frames_base / rel_path)
        return detect_blobs(IrFrame(t_us=t_us, pixels=pixels),
                            threshold=self.config.blob_threshold)

    def _process_imu(self, rec: ImuRecord) -> None:
        sample = ImuSample(t_us=rec.t_us, gyro=np.asarray(rec.gyro, dtype=float),
                           accel=np.asarray(rec.accel, dtype=float))
        filt = self.filters[rec.controller]
        if filt is None:
            try:
                self.filters[rec.controller] = init_from_accel(
                    sample, alpha=self.config.filter_alpha
                )
            except InitializationError:
                pass  # not quasi-static yet; keep waiting
        else:
            filt.step(sample)
        self.buttons[rec.controller] = bool(rec.button)
        self.jaws[rec.controller] = float(rec.jaw)

    def _process_stereo(self, t_us: int, left: list[Blob],
                        right: list[Blob]) -> list[TrackRow]:
        match = correspond_stereo(left, right, self.rig)
        points = []
        for pair in match.pairs:
            try:
                p, _ = triangulate_midpoint(pair, self.rig)
            except (DegenerateGeometryError, GapRejectError):
                continue
            points.append(p)
        frame = self.bank.update(points, t_us)
        return [
            TrackRow(
                t_us=t_us,
                controller=track.controller_id,
                raw=track.position_raw.copy(),
                smoothed=track.position_smoothed.copy(),
                orientation=self.orientation(track.controller_id),
                status=track.status.value,
            )
            for track in frame.tracks
        ]

    def orientation(self, controller: int) -> np.ndarray:
        filt = self.filters[controller]
        return filt.q.copy() if filt is not None else quat_identity()

    def fused_poses(self) -> dict[int, object]:
        """World-frame controller poses, None where not yet trackable."""
        poses: dict[int, object] = {0: None, 1: None}
        for cid in (0, 1):
            track = self.bank.tracks.get(cid)
            if track is None or self.filters[cid] is None:
                continue
            try:
                poses[cid] = fuse_pose(
                    track, self.orientation(cid), self.calib.tracker_to_world,
                    grip_offset=self.config.grip_offset,
                )
            except StalePoseError:
                pass
        return poses


def run_tracking(records, calib: Calibration | None = None,
                 config: FrontendConfig = FrontendConfig(),
                 frames_base=None) -> list[TrackRow]:
    """Track-only pass over a replay stream; one row per controller per frame."""
    frontend = TrackingFrontend(calib, config, frames_base=frames_base)
    rows: list[TrackRow] = []
    for record in records:
        rows.extend(frontend.process(record))
    return rows


POSE_CSV_HEADER = ("t_us,controller,raw_x,raw_y,raw_z,"
                   "smooth_x,smooth_y,smooth_z,qw,qx,qy,qz,status")


def write_pose_csv(rows, path) -> None:
    with Path(path).open("w") as fh:
        fh.write(POSE_CSV_HEADER + "\n")
        for r in rows:
            cells = [str(r.t_us), str(r.controller)]
            cells += [format(v, ".9f") for v in r.raw]
            cells += [format(v, ".9f") for v in r.smoothed]
            cells += [format(v, ".9f") for v in r.orientation]
            cells.append(r.status)
            fh.write(",".join(cells) + "\n")


class Engine:
    """Closed loop of frontend, clutch mapper, and task, stepped per tick.

    Also drivable without a frontend (poses supplied directly) so a live
    service can push virtual controller poses into the identical loop.
    """

    def __init__(self, scene: SceneConfig = SceneConfig(),
                 calib: Calibration | None = None,
                 frontend_config: FrontendConfig = FrontendConfig(),
                 frames_base=None):
        self.scene = scene
        self.task = scene.make_task()
        self.frontend = TrackingFrontend(calib, frontend_config,
                                         frames_base=frames_base)
        self.teleop = Teleop(
            initial_targets={
                iid: TipTarget(instrument_id=iid, pose=inst.tip_pose,
                               jaw_command=inst.jaw)
                for iid, inst in self.task.instruments.items()
            },
            camera_pose=self.task.camera_pose,
            translation_scale=scene.translation_scale,
            camera_translation_scale=scene.camera_translation_scale,
        )

    def tick_with_poses(self, poses: dict, buttons: tuple[bool, bool],
                        jaws: tuple[float, float]) -> tuple[list[str], list[Event]]:
        """One control+sim step from explicit controller poses."""
        targets, camera_pose, mode_events = self.teleop.tick(buttons, jaws, poses)
        self.task.camera_pose = camera_pose
        events = self.task.sim_step_targets(targets)
        return mode_events, events

    def frontend_control(self) -> tuple[dict[int, TipTarget], list[str]]:
        """Map the frontend's current fused state to tip targets (no sim step)."""
        poses = self.frontend.fused_poses()
        buttons = (self.frontend.buttons[0], self.frontend.buttons[1])
        jaws = (self.frontend.jaws[0], self.frontend.jaws[1])
        targets, camera_pose, mode_events = self.teleop.tick(buttons, jaws, poses)
        self.task.camera_pose = camera_pose
        return targets, mode_events

    def tick_from_frontend(self) -> tuple[list[str], list[Event]]:
        """One control+sim step from whatever the frontend has consumed.

        Stepping this after feeding records due by the task clock is
        equivalent to one replay_inputs/run_trial cycle, which is what makes
        live raw input and offline replay interchangeable.
        """
        targets, mode_events = self.frontend_control()
        events = self.task.sim_step_targets(targets)
        return mode_events, events

    def replay_inputs(self, records):
        """Generator of per-tick target dicts, consuming records as they
        come due against the task clock; closes over live state, so it must
        be stepped by the same task it was built with."""
        queue = list(records)
        index = 0
        while True:
            now = self.task.t_us
            while index < len(queue) and queue[index].t_us <= now:
                self.frontend.process(queue[index])
                index += 1
            targets, _ = self.frontend_control()
            yield targets


def run_replay(records, calib: Calibration | None = None,
               scene: SceneConfig = SceneConfig(), trial_id: int = 0,
               frames_base=None) -> TrialReport:
    """Run one full trial driven by a replay stream."""
    engine = Engine(scene, calib, frames_base=frames_base)
    return run_trial(engine.task, engine.replay_inputs(records),
                     scene.protocol, trial_id=trial_id)


def run_replay_session(replay_paths, calib: Calibration | None = None,
                       scene: SceneConfig = SceneConfig()) -> SessionReport:
    """One trial per replay file, scored as a session."""
    paths = [Path(p) for p in replay_paths]
    if len(paths) != scene.protocol.trials:
        raise ValueError(
            f"protocol expects {scene.protocol.trials} replay files, got {len(paths)}"
        )
    reports = tuple(
        run_replay(read_replay(path), calib, scene, trial_id=k,
                   frames_base=path.parent)
        for k, path in enumerate(paths)
    )
    return SessionReport(
        trials=reports,
        protocol=scene.protocol,
        transfer_improvement_pct=improvement_series(
            [r.transfers for r in reports], lower_is_better=False
        ),
        drop_improvement_pct=improvement_series(
            [r.drops for r in reports], lower_is_better=True
        ),
    )
