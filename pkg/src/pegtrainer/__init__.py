"""Deterministic dexterity-trainer engine: stereo marker tracking, IMU
orientation fusion, clutched teleoperation, RCM instrument kinematics, and a
scored peg-transfer simulation with record/replay tooling."""

from .calib import Calibration, default_calibration, load_calibration, save_calibration
from .engine import Engine, run_replay, run_replay_session, run_tracking
from .imu import ImuSample, OrientationFilter, init_from_accel
from .kinematics import (
    InstrumentModel,
    default_instruments,
    forward_kinematics,
    jacobian,
    solve_ik,
)
from .math3d import RigidTransform
from .packets import ControllerPacket, decode_packet, encode_packet
from .pegtask import Event, PegTransferTask, TaskConfig
from .replay import BlobsRecord, FramesRecord, ImuRecord, read_replay, write_replay
from .reports import canonical_json, parse_report, render_report, write_report
from .sceneconfig import SceneConfig, load_scene_config, save_scene_config
from .synth import NoiseSpec, synth_session, synthetic_user_session
from .teleop import ControllerPose, Teleop, TipTarget
from .tracking import TrackerBank
from .trial import (
    SessionReport,
    TrialProtocol,
    TrialReport,
    compute_metrics,
    improvement_series,
    run_session,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "BlobsRecord",
    "Calibration",
    "ControllerPacket",
    "ControllerPose",
    "Engine",
    "Event",
    "FramesRecord",
    "ImuRecord",
    "ImuSample",
    "InstrumentModel",
    "NoiseSpec",
    "OrientationFilter",
    "PegTransferTask",
    "RigidTransform",
    "SceneConfig",
    "SessionReport",
    "TaskConfig",
    "Teleop",
    "TipTarget",
    "TrackerBank",
    "TrialProtocol",
    "TrialReport",
    "canonical_json",
    "compute_metrics",
    "decode_packet",
    "default_calibration",
    "default_instruments",
    "encode_packet",
    "forward_kinematics",
    "improvement_series",
    "init_from_accel",
    "jacobian",
    "load_calibration",
    "load_scene_config",
    "parse_report",
    "read_replay",
    "render_report",
    "run_replay",
    "run_replay_session",
    "run_session",
    "run_tracking",
    "run_trial",
    "save_calibration",
    "save_scene_config",
    "solve_ik",
    "synth_session",
    "synthetic_user_session",
    "write_replay",
    "write_report",
]
