import numpy as np
import pytest

from pegtrainer.imu import (
    G,
    ImuSample,
    InitializationError,
    OrientationFilter,
    init_from_accel,
)
from pegtrainer.math3d import (
    quat_angle_between,
    quat_from_axis_angle,
    quat_identity,
    quat_integrate,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_twist_about,
)


def sample(t_us, gyro, accel):
    return ImuSample(t_us=t_us, gyro=np.asarray(gyro, float), accel=np.asarray(accel, float))


def test_init_level_is_identity():
    f = init_from_accel(sample(0, [0, 0, 0], [0, G, 0]))
    assert np.allclose(f.q, quat_identity(), atol=1e-12)


def test_init_90deg_roll():
    f = init_from_accel(sample(0, [0, 0, 0], [G, 0, 0]))
    # measured up along body +x: rotated 90 degrees, no heading component
    assert quat_angle_between(f.q, quat_identity()) == pytest.approx(np.pi / 2, abs=1e-9)
    assert np.allclose(quat_rotate(f.q, [1, 0, 0]), [0, 1, 0], atol=1e-9)
    yaw = quat_twist_about(f.q, [0, 1, 0])
    assert quat_angle_between(yaw, quat_identity()) < 1e-9


def test_init_30deg_tilt():
    f = init_from_accel(sample(0, [0, 0, 0], [G * np.sin(np.pi / 6), G * np.cos(np.pi / 6), 0]))
    assert quat_angle_between(f.q, quat_identity()) == pytest.approx(np.pi / 6, abs=1e-6)


def test_init_rejects_non_static():
    with pytest.raises(InitializationError):
        init_from_accel(sample(0, [0, 0, 0], [0, 3 * G, 0]))
    with pytest.raises(InitializationError):
        init_from_accel(sample(0, [0, 0, 0], [0, 0.2 * G, 0]))


def test_static_level_is_fixed_point():
    f = OrientationFilter(quat_identity(), alpha=0.02)
    for k in range(1, 200):
        q = f.step(sample(k * 10_000, [0, 0, 0], [0, G, 0]))
    assert np.allclose(q, quat_identity(), atol=1e-12)


def test_alpha_zero_is_pure_integration_bitwise():
    rng = np.random.default_rng(18)
    f = OrientationFilter(quat_identity(), alpha=0.0)
    q_ref = quat_identity()
    for k in range(1, 300):
        gyro = rng.normal(scale=1.5, size=3)
        accel = rng.normal(scale=2.0, size=3) + [0, G, 0]
        q = f.step(sample(k * 10_000, gyro, accel))
        q_ref = quat_integrate(q_ref, gyro, 0.01)
        assert np.array_equal(q, q_ref)


def test_accel_spike_gives_gyro_only_update():
    rng = np.random.default_rng(19)
    qs = []
    for alpha in (0.05, 0.0):
        f = OrientationFilter(quat_from_axis_angle([1, 0, 0], 0.3), alpha=alpha)
        rng_local = np.random.default_rng(19)
        for k in range(1, 50):
            gyro = rng_local.normal(scale=1.0, size=3)
            q = f.step(sample(k * 10_000, gyro, [0, 3 * G, 0]))  # gated out
        qs.append(q)
    assert np.array_equal(qs[0], qs[1])


def test_tilt_correction_converges():
    # start 30 degrees off; static accel pulls the estimate level
    f = OrientationFilter(quat_from_axis_angle([0, 0, 1], np.pi / 6), alpha=0.05)
    for k in range(1, 500):
        q = f.step(sample(k * 10_000, [0, 0, 0], [0, G, 0]))
    assert quat_angle_between(q, quat_identity()) < 1e-3


def test_heading_exactly_preserved_by_correction():
    # heading is unobservable: the correction must not move it at all
    yaw = quat_from_axis_angle([0, 1, 0], 1.1)
    tilt = quat_from_axis_angle([1, 0, 0], 0.4)
    f = OrientationFilter(quat_multiply(yaw, tilt), alpha=0.1)
    before = quat_twist_about(f.q, [0, 1, 0])
    for k in range(1, 400):
        f.step(sample(k * 10_000, [0, 0, 0], [0, G, 0]))
        after = quat_twist_about(f.q, [0, 1, 0])
        assert quat_angle_between(before, after) < 1e-12


def test_static_tilt_with_noise_and_bias():
    # the headline filter scenario: 30 degree tilt, noisy accel, biased gyro
    rng = np.random.default_rng(20)
    q_true = quat_from_axis_angle([0, 0, 1], np.pi / 6)
    a_body = quat_rotate(quat_normalize([q_true[0], -q_true[1], -q_true[2], -q_true[3]]), [0, G, 0])
    bias = np.array([0.01, 0.01, 0.01]) / np.sqrt(3)
    f = init_from_accel(sample(0, [0, 0, 0], a_body), alpha=0.02)
    for k in range(1, 801):
        gyro = bias
        accel = a_body + rng.normal(scale=0.05, size=3)
        f.step(sample(k * 10_000, gyro, accel))
        if k * 0.01 > 5.0:
            up_est = quat_rotate(f.q, a_body / np.linalg.norm(a_body))
            tilt_err = np.arccos(np.clip(np.dot(up_est, [0, 1, 0]), -1, 1))
            assert tilt_err < np.deg2rad(1.0)


def test_non_monotonic_sample_dropped():
    f = OrientationFilter(quat_identity(), alpha=0.02)
    f.step(sample(10_000, [1, 0, 0], [0, G, 0]))
    q_before = f.q.copy()
    f.step(sample(10_000, [5, 5, 5], [0, G, 0]))  # duplicate timestamp
    f.step(sample(5_000, [5, 5, 5], [0, G, 0]))   # going backwards
    assert np.array_equal(f.q, q_before)


def test_long_gap_holds_state():
    f = OrientationFilter(quat_from_axis_angle([1, 0, 0], 0.2), alpha=0.02)
    q_before = f.q.copy()
    f.step(sample(500_000, [3, 0, 0], [0, G, 0]))  # 0.5 s gap: dropout
    assert np.array_equal(f.q, q_before)
    # time re-anchored: the next sample integrates normally
    q = f.step(sample(510_000, [0, 0, 0], [0, G, 0]))
    assert quat_angle_between(q, q_before) < 0.02


def test_norm_preserved_long_run():
    rng = np.random.default_rng(21)
    f = OrientationFilter(quat_identity(), alpha=0.02)
    for k in range(1, 10_000):
        f.step(sample(k * 10_000, rng.normal(scale=2.0, size=3), rng.normal([0, G, 0], 0.3)))
    assert abs(np.linalg.norm(f.q) - 1.0) < 1e-9


def test_alpha_validation():
    with pytest.raises(ValueError):
        OrientationFilter(quat_identity(), alpha=1.0)
    with pytest.raises(ValueError):
        OrientationFilter(quat_identity(), alpha=-0.1)
