import numpy as np
import pytest

from pegtrainer.math3d import (
    RigidTransform,
    quat_angle_between,
    quat_from_axis_angle,
    quat_identity,
    quat_multiply,
    quat_normalize,
    quat_rotate,
)
from pegtrainer.teleop import (
    CLUTCHED,
    ENGAGED,
    MODE_CAMERA,
    MODE_NORMAL,
    ControllerPose,
    StalePoseError,
    Teleop,
    TipTarget,
    fuse_pose,
)
from pegtrainer.tracking import LEFT, RIGHT, MarkerTrack, TrackStatus


def pose(cid, p, q=None, t_us=0):
    return ControllerPose(
        controller_id=cid,
        position=np.asarray(p, dtype=float),
        orientation=quat_identity() if q is None else np.asarray(q, dtype=float),
        t_us=t_us,
    )


def make_teleop(**kw):
    targets = {
        LEFT: TipTarget(LEFT, RigidTransform(translation=np.array([-0.05, 0.05, 0.0])), 0.0),
        RIGHT: TipTarget(RIGHT, RigidTransform(translation=np.array([0.05, 0.05, 0.0])), 0.0),
    }
    return Teleop(targets, RigidTransform(translation=np.array([0.0, 0.3, 0.4])), **kw)


def track(cid, smoothed, status=TrackStatus.TRACKED):
    return MarkerTrack(
        controller_id=cid,
        position_raw=np.asarray(smoothed, float),
        position_smoothed=np.asarray(smoothed, float),
        velocity=np.zeros(3),
        status=status,
        last_update_us=42,
    )


def test_fuse_pose_identity_calib_zero_offset():
    q = quat_from_axis_angle([0, 1, 0], 0.3)
    p = fuse_pose(track(LEFT, [0.1, 0.2, 0.3]), q, RigidTransform.identity())
    assert np.allclose(p.position, [0.1, 0.2, 0.3])
    assert np.allclose(p.orientation, q)


def test_fuse_pose_applies_lever_arm():
    p = fuse_pose(
        track(LEFT, [0, 0, 0]), quat_identity(), RigidTransform.identity(),
        grip_offset=(0, 0, 0.05),
    )
    assert np.allclose(p.position, [0, 0, 0.05])


def test_fuse_pose_matches_hand_computation():
    rng = np.random.default_rng(22)
    for _ in range(50):
        q = quat_normalize(rng.normal(size=4))
        r = rng.normal(size=3) * 0.05
        marker = rng.normal(size=3) * 0.2
        calib = RigidTransform(quat_normalize(rng.normal(size=4)), rng.normal(size=3))
        got = fuse_pose(track(LEFT, marker), q, calib, grip_offset=r)
        want = calib.apply(marker) + quat_rotate(q, r)
        assert np.allclose(got.position, want, atol=1e-12)


def test_fuse_pose_rejects_lost_track():
    with pytest.raises(StalePoseError):
        fuse_pose(track(LEFT, [0, 0, 0], TrackStatus.LOST), quat_identity(),
                  RigidTransform.identity())


def test_fresh_start_engages_both():
    t = make_teleop()
    poses = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), poses)
    assert t.modes[LEFT] == ENGAGED and t.modes[RIGHT] == ENGAGED
    assert t.global_mode == MODE_NORMAL


def test_single_button_clutches_one_side():
    t = make_teleop()
    poses = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), poses)
    t.tick((True, False), (0.0, 0.0), poses)
    assert t.modes[LEFT] == CLUTCHED and t.modes[RIGHT] == ENGAGED
    assert t.global_mode == MODE_NORMAL


def test_both_buttons_enter_camera_adjust():
    t = make_teleop()
    poses = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), poses)
    _, _, events = t.tick((True, True), (0.0, 0.0), poses)
    assert t.global_mode == MODE_CAMERA
    assert "camera_adjust_started" in events


def test_translation_scaling():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    before = t.targets[LEFT].pose.translation.copy()
    p1 = {LEFT: pose(LEFT, [0.0, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    targets, _, _ = t.tick((False, False), (0.0, 0.0), p1)
    assert np.allclose(targets[LEFT].pose.translation - before, [0.05, 0, 0], atol=1e-12)


def test_rotation_unscaled():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    q = quat_from_axis_angle([0, 0, 1], np.deg2rad(30))
    p1 = {LEFT: pose(LEFT, [-0.1, 0, 0], q), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    targets, _, _ = t.tick((False, False), (0.0, 0.0), p1)
    assert quat_angle_between(targets[LEFT].pose.rotation, q) < 1e-9


def test_translation_equivariance():
    rng = np.random.default_rng(23)
    offset = rng.normal(size=3)
    results = []
    for shift in (np.zeros(3), offset):
        t = make_teleop()
        p0 = {LEFT: pose(LEFT, shift + [-0.1, 0, 0]), RIGHT: pose(RIGHT, shift + [0.1, 0, 0])}
        t.tick((False, False), (0.0, 0.0), p0)
        p1 = {
            LEFT: pose(LEFT, shift + [-0.07, 0.02, 0.01]),
            RIGHT: pose(RIGHT, shift + [0.1, 0, 0]),
        }
        targets, _, _ = t.tick((False, False), (0.0, 0.0), p1)
        results.append(targets[LEFT].pose.translation.copy())
    assert np.allclose(results[0], results[1], atol=1e-12)


def test_clutched_target_is_bitwise_frozen():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    targets0, _, _ = t.tick((True, False), (0.0, 0.0), p0)
    frozen = targets0[LEFT]
    for k in range(10):
        p = {LEFT: pose(LEFT, [-0.1 + 0.01 * k, 0.02 * k, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
        targets, _, _ = t.tick((True, False), (0.5, 0.0), p)
        assert targets[LEFT] is frozen


def test_no_jump_on_clutch_release():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    # move, clutch, move hand far away, release at the new spot
    q = quat_from_axis_angle([1, 0, 0], 0.7)
    p1 = {LEFT: pose(LEFT, [-0.05, 0.03, 0.01], q), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p1)
    frozen = t.targets[LEFT]
    p2 = {LEFT: pose(LEFT, [0.2, -0.1, 0.3], quat_from_axis_angle([0, 1, 0], 1.0)),
          RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((True, False), (0.0, 0.0), p2)
    targets, _, _ = t.tick((False, False), (0.0, 0.0), p2)
    moved = targets[LEFT]
    assert np.all(moved.pose.translation == frozen.pose.translation)
    assert quat_angle_between(moved.pose.rotation, frozen.pose.rotation) == 0.0


def test_scaling_direction_invariance():
    dirs = []
    for scale in (0.5, 1.0):
        t = make_teleop(translation_scale=scale)
        p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
        t.tick((False, False), (0.0, 0.0), p0)
        start = t.targets[LEFT].pose.translation.copy()
        p1 = {LEFT: pose(LEFT, [-0.06, 0.03, -0.02]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
        targets, _, _ = t.tick((False, False), (0.0, 0.0), p1)
        d = targets[LEFT].pose.translation - start
        dirs.append(d)
    assert np.allclose(dirs[1], 2.0 * dirs[0], atol=1e-12)


def test_camera_translation_follows_hands_inverse():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    cam0 = t.camera_pose
    t.tick((True, True), (0.0, 0.0), p0)
    p1 = {LEFT: pose(LEFT, [0.0, 0, 0]), RIGHT: pose(RIGHT, [0.2, 0, 0])}
    _, cam, _ = t.tick((True, True), (0.0, 0.0), p1)
    assert np.allclose(cam.translation - cam0.translation, [-0.1, 0, 0], atol=1e-12)
    assert quat_angle_between(cam.rotation, cam0.rotation) < 1e-12


def test_camera_yaw_counter_rotates():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    cam0 = t.camera_pose
    t.tick((True, True), (0.0, 0.0), p0)
    # orbit hands 45 degrees about world y, fixed midpoint at origin
    ang = np.deg2rad(45)
    rot = quat_from_axis_angle([0, 1, 0], ang)
    p1 = {
        LEFT: pose(LEFT, quat_rotate(rot, [-0.1, 0, 0])),
        RIGHT: pose(RIGHT, quat_rotate(rot, [0.1, 0, 0])),
    }
    _, cam, _ = t.tick((True, True), (0.0, 0.0), p1)
    expected_rot = quat_multiply(quat_from_axis_angle([0, 1, 0], -ang), cam0.rotation)
    assert quat_angle_between(cam.rotation, expected_rot) < 1e-9


def test_camera_compose_invert_oracle():
    rng = np.random.default_rng(24)
    for _ in range(20):
        t = make_teleop()
        lp = rng.normal(size=3) * 0.1
        rp = lp + [0.2, 0, 0]
        p0 = {LEFT: pose(LEFT, lp), RIGHT: pose(RIGHT, rp)}
        t.tick((False, False), (0.0, 0.0), p0)
        cam0 = t.camera_pose
        t.tick((True, True), (0.0, 0.0), p0)
        # random rigid motion of the hand pair
        rot = quat_from_axis_angle(
            (lambda a: a / np.linalg.norm(a))(rng.normal(size=3)), rng.uniform(0.1, 1.0)
        )
        m0 = (lp + rp) / 2
        shift = rng.normal(size=3) * 0.1
        move = lambda p: quat_rotate(rot, p - m0) + m0 + shift
        p1 = {LEFT: pose(LEFT, move(lp)), RIGHT: pose(RIGHT, move(rp))}
        _, cam, _ = t.tick((True, True), (0.0, 0.0), p1)
        # scene-follows-hands: viewing the entry hand positions through the
        # new camera equals viewing the moved positions through the entry
        # camera (exact on the hand axis; roll about it is unobservable)
        for probe, moved in ((lp, move(lp)), (rp, move(rp)), (m0, move(m0))):
            lhs = cam.inverse().apply(probe)
            rhs = cam0.inverse().apply(moved)
            assert np.allclose(lhs, rhs, atol=1e-9)


def test_camera_rotation_frozen_when_hands_too_close():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.002, 0, 0]), RIGHT: pose(RIGHT, [0.002, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    cam0 = t.camera_pose
    t.tick((True, True), (0.0, 0.0), p0)
    p1 = {LEFT: pose(LEFT, [0, 0.004, 0]), RIGHT: pose(RIGHT, [0.004, 0, 0])}
    _, cam, _ = t.tick((True, True), (0.0, 0.0), p1)
    assert quat_angle_between(cam.rotation, cam0.rotation) == 0.0


def test_jaw_command_clamped_and_frozen_while_clutched():
    t = make_teleop()
    p0 = {LEFT: pose(LEFT, [-0.1, 0, 0]), RIGHT: pose(RIGHT, [0.1, 0, 0])}
    t.tick((False, False), (0.0, 0.0), p0)
    targets, _, _ = t.tick((False, False), (1.7, -0.3), p0)
    assert targets[LEFT].jaw_command == 1.0
    assert targets[RIGHT].jaw_command == 0.0
    t.tick((True, False), (1.0, 0.0), p0)
    targets, _, _ = t.tick((True, False), (0.0, 0.0), p0)
    assert targets[LEFT].jaw_command == 1.0  # frozen while clutched
