"""Stereo correspondence and midpoint triangulation for a two-camera rig.

The rig's reference frame is the left camera. The default rig is rectified
(both cameras axis-aligned, right camera offset along +x by the baseline), so
corresponding detections share a scanline up to a small tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blobs import Blob
from .math3d import PinholeCamera, RigidTransform

DEFAULT_EPIPOLAR_TOL_PX = 2.0
DEFAULT_GAP_REJECT_M = 0.005
DEFAULT_MIN_RAY_ANGLE_DEG = 0.05
MAX_CONTROLLERS = 2
MAX_MATCH_BLOBS = 4  # per side: two controllers plus clutter margin


class DegenerateGeometryError(ValueError):
    """Rays too close to parallel to intersect meaningfully."""


class GapRejectError(ValueError):
    """Rays pass farther apart than the plausibility bound."""


@dataclass(frozen=True)
class StereoRig:
    left: PinholeCamera
    right: PinholeCamera

    @staticmethod
    def rectified(fx: float = 500.0, fy: float = 500.0, cx: float = 320.0, cy: float = 240.0,
                  width: int = 640, height: int = 480, baseline: float = 0.04) -> "StereoRig":
        left = PinholeCamera(fx, fy, cx, cy, width, height)
        right = PinholeCamera(
            fx, fy, cx, cy, width, height,
            pose_in_rig=RigidTransform(translation=np.array([baseline, 0.0, 0.0])),
        )
        return StereoRig(left, right)


@dataclass(frozen=True)
class StereoMatchResult:
    pairs: list[tuple[Blob, Blob]]
    ambiguous: bool  # more consistent pairs than controllers exist


def correspond_stereo(left: list[Blob], right: list[Blob], rig: StereoRig,
                      epipolar_tol_px: float = DEFAULT_EPIPOLAR_TOL_PX) -> StereoMatchResult:
    """Pair left/right blobs on epipolar consistency with positive disparity.

    Among the gated candidates, the assignment matching the most blobs wins,
    with smallest total scanline difference breaking ties (each blob used at
    most once). Maximizing the pair count is what resolves the side-by-side
    start posture: there a cross pairing is also epipolar-consistent, but it
    strands its complement at negative disparity, so it matches fewer blobs.
    Unmatched blobs are dropped; only the MAX_MATCH_BLOBS largest blobs per
    side enter the search, which keeps it exact and cheap.
    """
    left = left[:MAX_MATCH_BLOBS]
    right = right[:MAX_MATCH_BLOBS]
    gated: list[list[tuple[int, float]]] = []
    for lb in left:
        row = []
        for ri, rb in enumerate(right):
            dv = abs(lb.centroid_v - rb.centroid_v)
            if dv <= epipolar_tol_px and lb.centroid_u - rb.centroid_u > 0:
                row.append((ri, dv))
        gated.append(row)

    # exhaustive search over assignments; tiny because the sides are capped.
    # best key: most pairs, then least total dv, then first-listed blobs
    best_pairs: list[tuple[int, int]] = []
    best_key: tuple = (0, 0.0, ())

    def search(li: int, used_r: frozenset, total_dv: float, chosen: tuple) -> None:
        nonlocal best_pairs, best_key
        if li == len(left):
            key = (len(chosen), -total_dv,
                   tuple(-i for pair in chosen for i in pair))
            if key > best_key:
                best_key = key
                best_pairs = list(chosen)
            return
        search(li + 1, used_r, total_dv, chosen)  # leave this blob unmatched
        for ri, dv in gated[li]:
            if ri not in used_r:
                search(li + 1, used_r | {ri}, total_dv + dv,
                       chosen + ((li, ri),))

    search(0, frozenset(), 0.0, ())
    pairs = [(left[li], right[ri]) for li, ri in best_pairs]
    return StereoMatchResult(pairs=pairs, ambiguous=len(pairs) > MAX_CONTROLLERS)


def triangulate_midpoint(pair: tuple[Blob, Blob], rig: StereoRig,
                         gap_reject_m: float = DEFAULT_GAP_REJECT_M,
                         min_ray_angle_deg: float = DEFAULT_MIN_RAY_ANGLE_DEG,
                         ) -> tuple[np.ndarray, float]:
    """Midpoint of the common perpendicular between the two viewing rays.

    Returns (point in the rig frame, gap) where gap is the closest distance
    between the rays; gap doubles as a correspondence quality measure.
    """
    lb, rb = pair
    o1, d1 = rig.left.backproject_ray(lb.centroid_u, lb.centroid_v)
    o2, d2 = rig.right.backproject_ray(rb.centroid_u, rb.centroid_v)

    cross = np.cross(d1, d2)
    sin_angle = np.linalg.norm(cross)  # both directions are unit
    if sin_angle < np.sin(np.deg2rad(min_ray_angle_deg)):
        raise DegenerateGeometryError(
            f"ray angle {np.rad2deg(np.arcsin(sin_angle)):.4f} deg below minimum"
        )

    # closest points: o1 + t1 d1 and o2 + t2 d2
    w = o2 - o1
    a = np.dot(d1, d2)
    t1 = (np.dot(w, d1) - a * np.dot(w, d2)) / (1.0 - a * a)
    t2 = (a * np.dot(w, d1) - np.dot(w, d2)) / (1.0 - a * a)
    p1 = o1 + t1 * d1
    p2 = o2 + t2 * d2
    gap = float(np.linalg.norm(p1 - p2))
    if gap > gap_reject_m:
        raise GapRejectError(f"ray gap {gap * 1000:.2f} mm exceeds limit")
    return (p1 + p2) / 2.0, gap
