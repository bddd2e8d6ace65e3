"""Calibration files: camera intrinsics, stereo extrinsics, tracker placement.

JSON on disk, floats kept at full precision so a load/save cycle is
lossless. Lens distortion is pinned at zero (rectified cameras); files
carrying nonzero coefficients are rejected rather than silently ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .math3d import PinholeCamera, RigidTransform
from .stereo import StereoRig

CALIBRATION_KIND = "camera_calibration"
DEFAULT_TRACKER_TO_WORLD = RigidTransform(
    # camera half a meter in front of the board, looking back at it;
    # the half-turn about x maps the rig's image-down +Y onto world -Y
    rotation=np.array([0.0, 1.0, 0.0, 0.0]),
    translation=np.array([0.0, 0.35, 0.5]),
)


def pose_to_json(pose: RigidTransform) -> dict:
    return {
        "rotation": [float(v) for v in pose.rotation],
        "translation": [float(v) for v in pose.translation],
    }


def pose_from_json(obj: dict) -> RigidTransform:
    rotation = obj["rotation"]
    translation = obj["translation"]
    if len(rotation) != 4 or len(translation) != 3:
        raise ValueError("pose needs a 4-element rotation and 3-element translation")
    return RigidTransform(np.array(rotation, dtype=float),
                          np.array(translation, dtype=float))


def _camera_to_json(cam: PinholeCamera) -> dict:
    return {
        "fx": cam.fx, "fy": cam.fy, "cx": cam.cx, "cy": cam.cy,
        "width": cam.width, "height": cam.height,
        "distortion": [0.0] * 5,
        "pose_in_rig": pose_to_json(cam.pose_in_rig),
    }


def _camera_from_json(obj: dict) -> PinholeCamera:
    if any(v != 0.0 for v in obj.get("distortion", [])):
        raise ValueError("nonzero distortion coefficients are not supported")
    return PinholeCamera(
        fx=float(obj["fx"]), fy=float(obj["fy"]),
        cx=float(obj["cx"]), cy=float(obj["cy"]),
        width=int(obj["width"]), height=int(obj["height"]),
        pose_in_rig=pose_from_json(obj["pose_in_rig"]),
    )


@dataclass(frozen=True)
class Calibration:
    left: PinholeCamera
    right: PinholeCamera
    tracker_to_world: RigidTransform

    def rig(self) -> StereoRig:
        return StereoRig(left=self.left, right=self.right)

    @property
    def baseline_m(self) -> float:
        return float(self.right.pose_in_rig.translation[0])


def default_calibration() -> Calibration:
    rig = StereoRig.rectified()
    return Calibration(left=rig.left, right=rig.right,
                       tracker_to_world=DEFAULT_TRACKER_TO_WORLD)


def calibration_to_json(calib: Calibration) -> dict:
    return {
        "kind": CALIBRATION_KIND,
        "cameras": {
            "left": _camera_to_json(calib.left),
            "right": _camera_to_json(calib.right),
        },
        "tracker_to_world": pose_to_json(calib.tracker_to_world),
    }


def calibration_from_json(obj: dict) -> Calibration:
    if obj.get("kind") != CALIBRATION_KIND:
        raise ValueError(f"not a calibration document (kind={obj.get('kind')!r})")
    return Calibration(
        left=_camera_from_json(obj["cameras"]["left"]),
        right=_camera_from_json(obj["cameras"]["right"]),
        tracker_to_world=pose_from_json(obj["tracker_to_world"]),
    )


def save_calibration(calib: Calibration, path) -> None:
    Path(path).write_text(json.dumps(calibration_to_json(calib), indent=2) + "\n")


def load_calibration(path) -> Calibration:
    return calibration_from_json(json.loads(Path(path).read_text()))
