import numpy as np
import pytest

from pegtrainer.blobs import Blob
from pegtrainer.stereo import (
    DegenerateGeometryError,
    GapRejectError,
    StereoRig,
    correspond_stereo,
    triangulate_midpoint,
)


def blob(u, v):
    return Blob(centroid_u=u, centroid_v=v, area=9, peak=255)


@pytest.fixture
def rig():
    return StereoRig.rectified()


def test_same_scanline_positive_disparity_matches(rig):
    result = correspond_stereo([blob(370, 240)], [blob(350, 240)], rig)
    assert len(result.pairs) == 1
    assert not result.ambiguous


def test_epipolar_violation_rejected(rig):
    result = correspond_stereo([blob(370, 240)], [blob(370, 300)], rig)
    assert result.pairs == []


def test_negative_disparity_rejected(rig):
    result = correspond_stereo([blob(350, 240)], [blob(370, 240)], rig)
    assert result.pairs == []


def test_each_blob_used_once(rig):
    left = [blob(370, 240), blob(300, 240)]
    right = [blob(350, 240)]
    result = correspond_stereo(left, right, rig)
    assert len(result.pairs) == 1
    # only the 370 pairing has positive disparity against the single right blob
    assert result.pairs[0][0].centroid_u == 370


def test_two_controller_scene_matches_both(rig):
    left = [blob(370, 240), blob(200, 100)]
    right = [blob(350, 240), blob(185, 100.5)]
    result = correspond_stereo(left, right, rig)
    assert len(result.pairs) == 2
    assert not result.ambiguous


def test_side_by_side_markers_same_scanline(rig):
    # both markers at the same height: every left-right combination is
    # epipolar-consistent, and the cross pairing is rejected only because
    # it matches fewer blobs (its complement has negative disparity)
    pts = [np.array([-0.05, 0.0, 0.30]), np.array([0.05, 0.0, 0.30])]
    left = [blob(*rig.left.project(p)) for p in pts]
    right = [blob(*rig.right.project(p)) for p in pts]
    result = correspond_stereo(left, right, rig)
    assert len(result.pairs) == 2
    got = sorted(
        (triangulate_midpoint(pair, rig)[0] for pair in result.pairs),
        key=lambda q: q[0],
    )
    for g, w in zip(got, pts):
        assert np.allclose(g, w, atol=1e-9)


def test_ambiguity_flag_when_more_pairs_than_controllers(rig):
    left = [blob(300, 100), blob(300, 200), blob(300, 300)]
    right = [blob(280, 100), blob(280, 200), blob(280, 300)]
    result = correspond_stereo(left, right, rig)
    assert len(result.pairs) == 3
    assert result.ambiguous


def test_triangulate_disparity_example(rig):
    p, gap = triangulate_midpoint((blob(370, 240), blob(350, 240)), rig)
    # Z = fx * baseline / disparity = 500 * 0.04 / 20 = 1.0
    assert np.allclose(p, [0.10, 0.0, 1.0], atol=1e-9)
    assert gap < 1e-12


def test_triangulate_identical_pixels_degenerate(rig):
    with pytest.raises(DegenerateGeometryError):
        triangulate_midpoint((blob(320, 240), blob(320, 240)), rig)


def test_triangulate_gap_reject(rig):
    # wildly inconsistent vertical coordinates produce a large ray gap
    with pytest.raises(GapRejectError):
        triangulate_midpoint((blob(370, 300), blob(350, 200)), rig)


def test_projection_round_trip_noiseless(rig):
    rng = np.random.default_rng(15)
    worst = 0.0
    for _ in range(200):
        p = np.array(
            [rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1), rng.uniform(0.2, 0.5)]
        )
        ul, vl = rig.left.project(p)
        ur, vr = rig.right.project(p)
        p_hat, gap = triangulate_midpoint((blob(ul, vl), blob(ur, vr)), rig)
        worst = max(worst, float(np.linalg.norm(p_hat - p)))
        assert gap < 1e-12
    assert worst < 1e-9


def test_round_trip_through_correspondence(rig):
    rng = np.random.default_rng(16)
    for _ in range(50):
        pts = [
            np.array([rng.uniform(-0.1, -0.02), rng.uniform(-0.08, -0.02), rng.uniform(0.25, 0.4)]),
            np.array([rng.uniform(0.02, 0.1), rng.uniform(0.02, 0.08), rng.uniform(0.25, 0.4)]),
        ]
        left = [blob(*rig.left.project(p)) for p in pts]
        right = [blob(*rig.right.project(p)) for p in pts]
        result = correspond_stereo(left, right, rig)
        assert len(result.pairs) == 2
        got = sorted(
            (triangulate_midpoint(pair, rig)[0] for pair in result.pairs),
            key=lambda q: q[0],
        )
        want = sorted(pts, key=lambda q: q[0])
        for g, w in zip(got, want):
            assert np.allclose(g, w, atol=1e-9)
