"""Clutched master-to-instrument motion mapping and camera adjustment.

Each controller drives one instrument tip through anchored deltas: engaging
after a clutch records the controller pose and the current tip target, and
subsequent motion applies scaled translation (rotation 1:1) relative to those
anchors, so targets never jump at a clutch release. Holding a controller's
button clutches (freezes) its instrument; holding both buttons enters a
camera-adjust mode where the pair of hands grabs the world: the view follows
the midpoint and the inter-hand direction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .math3d import (
    RigidTransform,
    quat_conjugate,
    quat_multiply,
    quat_rotate,
    quat_shortest_arc,
)
from .tracking import LEFT, RIGHT, MarkerTrack, TrackStatus

DEFAULT_TRANSLATION_SCALE = 0.5
DEFAULT_CAMERA_TRANSLATION_SCALE = 1.0
MIN_HAND_SEPARATION_M = 0.01

ENGAGED = "engaged"
CLUTCHED = "clutched"
MODE_NORMAL = "normal"
MODE_CAMERA = "camera_adjust"


class StalePoseError(ValueError):
    """Marker track is lost; the pose cannot be trusted."""


@dataclass(frozen=True)
class ControllerPose:
    controller_id: int
    position: np.ndarray      # world, meters
    orientation: np.ndarray   # world, unit quaternion
    t_us: int


@dataclass(frozen=True)
class TipTarget:
    instrument_id: int
    pose: RigidTransform
    jaw_command: float

    def __post_init__(self):
        object.__setattr__(self, "jaw_command", float(min(1.0, max(0.0, self.jaw_command))))


def fuse_pose(track: MarkerTrack, orientation, tracker_to_world: RigidTransform,
              grip_offset=(0.0, 0.0, 0.0)) -> ControllerPose:
    """Combine a smoothed marker position with a filtered orientation.

    The marker sits on the controller body, offset from the grip point; the
    offset is expressed in the body frame and rotated by the orientation.
    """
    if track.status == TrackStatus.LOST:
        raise StalePoseError(f"controller {track.controller_id} track lost")
    p_world = tracker_to_world.apply(track.position_smoothed)
    p_world = p_world + quat_rotate(orientation, np.asarray(grip_offset, dtype=float))
    return ControllerPose(
        controller_id=track.controller_id,
        position=p_world,
        orientation=np.asarray(orientation, dtype=float),
        t_us=track.last_update_us,
    )


@dataclass
class _Anchor:
    controller_position: np.ndarray
    controller_orientation: np.ndarray
    tip: TipTarget


class Teleop:
    """Per-tick mapping from controller poses + buttons to tip targets."""

    def __init__(self, initial_targets: dict[int, TipTarget],
                 camera_pose: RigidTransform,
                 translation_scale: float = DEFAULT_TRANSLATION_SCALE,
                 camera_translation_scale: float = DEFAULT_CAMERA_TRANSLATION_SCALE):
        self.translation_scale = translation_scale
        self.camera_translation_scale = camera_translation_scale
        self.targets: dict[int, TipTarget] = dict(initial_targets)
        self.camera_pose = camera_pose
        self.modes: dict[int, str] = {LEFT: CLUTCHED, RIGHT: CLUTCHED}
        self.global_mode: str = MODE_NORMAL
        self.anchors: dict[int, _Anchor | None] = {LEFT: None, RIGHT: None}
        self._camera_anchor: tuple[np.ndarray, np.ndarray, RigidTransform] | None = None

    # -- mode transitions ---------------------------------------------------

    def update_mode(self, buttons: tuple[bool, bool],
                    poses: dict[int, ControllerPose | None]) -> list[str]:
        """Apply button state: held = clutched, both held = camera adjust.

        Releasing re-anchors that controller at its current pose and frozen
        target, which is what makes clutch transitions jump-free.
        """
        events: list[str] = []
        both = buttons[0] and buttons[1]
        if both and self.global_mode == MODE_NORMAL:
            lp, rp = poses.get(LEFT), poses.get(RIGHT)
            if lp is not None and rp is not None:
                m0 = (lp.position + rp.position) / 2.0
                v0 = rp.position - lp.position
                self._camera_anchor = (m0, v0, self.camera_pose)
                self.global_mode = MODE_CAMERA
                events.append("camera_adjust_started")
        elif not both and self.global_mode == MODE_CAMERA:
            self.global_mode = MODE_NORMAL
            self._camera_anchor = None
            events.append("camera_adjust_ended")

        for cid, held in ((LEFT, buttons[0]), (RIGHT, buttons[1])):
            if held and self.modes[cid] == ENGAGED:
                self.modes[cid] = CLUTCHED
                self.anchors[cid] = None
                events.append(f"clutch_engaged_{cid}")
            elif not held and self.modes[cid] == CLUTCHED:
                pose = poses.get(cid)
                if pose is not None:
                    self.anchors[cid] = _Anchor(
                        controller_position=pose.position.copy(),
                        controller_orientation=pose.orientation.copy(),
                        tip=self.targets[cid],
                    )
                    self.modes[cid] = ENGAGED
                    events.append(f"clutch_released_{cid}")
        return events

    # -- motion mapping -----------------------------------------------------

    def map_motion(self, pose: ControllerPose) -> TipTarget:
        """Anchored delta mapping for one engaged controller."""
        cid = pose.controller_id
        anchor = self.anchors[cid]
        if anchor is None:
            return self.targets[cid]
        dp = self.translation_scale * (pose.position - anchor.controller_position)
        dq = quat_multiply(pose.orientation, quat_conjugate(anchor.controller_orientation))
        target = TipTarget(
            instrument_id=cid,
            pose=RigidTransform(
                quat_multiply(dq, anchor.tip.pose.rotation),
                anchor.tip.pose.translation + dp,
            ),
            jaw_command=self.targets[cid].jaw_command,
        )
        self.targets[cid] = target
        return target

    def camera_adjust(self, left: ControllerPose, right: ControllerPose) -> RigidTransform:
        """Grab-the-world: the scene follows the hands, so the camera moves
        by the inverse of the hands' rigid motion about the entry midpoint."""
        if self._camera_anchor is None:
            raise ValueError("camera adjust not active")
        m0, v0, cam0 = self._camera_anchor
        m = (left.position + right.position) / 2.0
        v = right.position - left.position
        if np.linalg.norm(v) < MIN_HAND_SEPARATION_M or np.linalg.norm(v0) < MIN_HAND_SEPARATION_M:
            rot = np.array([1.0, 0.0, 0.0, 0.0])  # hands too close: freeze rotation
        else:
            rot = quat_shortest_arc(v0, v)
        delta = self.camera_translation_scale * (m - m0)
        # world motion W: rotate about m0 by rot, then translate by delta
        w = RigidTransform(rot, m0 - quat_rotate(rot, m0) + delta)
        self.camera_pose = w.inverse().compose(cam0)
        return self.camera_pose

    # -- per-tick orchestration ----------------------------------------------

    def tick(self, buttons: tuple[bool, bool], jaws: tuple[float, float],
             poses: dict[int, ControllerPose | None]) -> tuple[dict[int, TipTarget], RigidTransform, list[str]]:
        """One control cycle: transitions, then motion/camera mapping.

        Targets of clutched controllers are returned frozen (the identical
        object, bit for bit). Jaw commands only apply while engaged.
        """
        events = self.update_mode(buttons, poses)
        if self.global_mode == MODE_CAMERA:
            lp, rp = poses.get(LEFT), poses.get(RIGHT)
            if lp is not None and rp is not None:
                self.camera_adjust(lp, rp)
        else:
            for cid, jaw in ((LEFT, jaws[0]), (RIGHT, jaws[1])):
                pose = poses.get(cid)
                if self.modes[cid] == ENGAGED and pose is not None:
                    if self.targets[cid].jaw_command != jaw:
                        self.targets[cid] = replace(self.targets[cid], jaw_command=jaw)
                    self.map_motion(pose)
        return dict(self.targets), self.camera_pose, events
