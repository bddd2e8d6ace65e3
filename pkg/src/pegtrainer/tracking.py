"""Per-controller marker tracks over triangulated observations.

Each controller carries a single marker, so identity cannot come from the
detector; it is established once at session start (the marker with smaller x
in the rig frame is the left controller, which requires the documented start
posture) and then maintained frame-to-frame by gated nearest-neighbor
assignment with short constant-velocity coasting through dropouts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

LEFT = 0
RIGHT = 1

DEFAULT_GATE_MM = 30.0
DEFAULT_COAST_LIMIT_MS = 200.0
DEFAULT_WINDOW = 5


class TrackStatus(Enum):
    TRACKED = "tracked"
    COASTING = "coasting"
    LOST = "lost"


class MovingAverageFilter:
    """Arithmetic mean over the most recent window_size samples.

    During warm-up the mean runs over however many samples have arrived.
    """

    def __init__(self, window_size: int = DEFAULT_WINDOW):
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        self.window_size = window_size
        self.buffer: deque = deque(maxlen=window_size)

    def push(self, sample) -> np.ndarray:
        self.buffer.append(np.asarray(sample, dtype=float))
        return np.mean(self.buffer, axis=0)

    def reset(self) -> None:
        self.buffer.clear()


@dataclass
class MarkerTrack:
    controller_id: int
    position_raw: np.ndarray
    position_smoothed: np.ndarray
    velocity: np.ndarray
    status: TrackStatus
    last_update_us: int  # time of the last real observation


@dataclass(frozen=True)
class TrackerFrame:
    t_us: int
    tracks: tuple
    ambiguous: bool


class TrackerBank:
    """Holds the two controller tracks and assigns observations to them."""

    def __init__(self, gate_mm: float = DEFAULT_GATE_MM,
                 coast_limit_ms: float = DEFAULT_COAST_LIMIT_MS,
                 window: int = DEFAULT_WINDOW):
        self.gate_m = gate_mm / 1000.0
        self.coast_limit_us = int(coast_limit_ms * 1000)
        self.window = window
        self.tracks: dict[int, MarkerTrack] = {}
        self._filters: dict[int, MovingAverageFilter] = {}
        self._last_t_us: int | None = None

    @property
    def initialized(self) -> bool:
        return bool(self.tracks)

    def update(self, observations, t_us: int) -> TrackerFrame:
        """Advance all tracks with this frame's triangulated points."""
        observations = [np.asarray(p, dtype=float) for p in observations]
        if not self.initialized:
            return self._try_init(observations, t_us)

        dt = 0.0 if self._last_t_us is None else (t_us - self._last_t_us) * 1e-6
        self._last_t_us = t_us

        ambiguous = False
        remaining = list(enumerate(observations))
        assignment: dict[int, int] = {}
        # greedy smallest-distance assignment, gated
        scored = []
        for cid, track in self.tracks.items():
            in_gate = 0
            for oi, obs in remaining:
                d = float(np.linalg.norm(obs - track.position_raw))
                if d <= self.gate_m:
                    in_gate += 1
                    scored.append((d, cid, oi))
            if in_gate > 1:
                ambiguous = True
        scored.sort()
        used_obs: set[int] = set()
        for d, cid, oi in scored:
            if cid in assignment or oi in used_obs:
                continue
            assignment[cid] = oi
            used_obs.add(oi)

        for cid, track in self.tracks.items():
            if cid in assignment:
                self._observe(track, observations[assignment[cid]], t_us, dt)
            else:
                self._miss(track, t_us, dt)
        return self._frame(t_us, ambiguous)

    def _try_init(self, observations, t_us: int) -> TrackerFrame:
        if len(observations) != 2:
            # cannot tell the controllers apart until both are visible
            return TrackerFrame(t_us=t_us, tracks=(), ambiguous=len(observations) > 2)
        by_x = sorted(observations, key=lambda p: p[0])
        for cid, pos in zip((LEFT, RIGHT), by_x):
            f = MovingAverageFilter(self.window)
            self.tracks[cid] = MarkerTrack(
                controller_id=cid,
                position_raw=pos.copy(),
                position_smoothed=f.push(pos),
                velocity=np.zeros(3),
                status=TrackStatus.TRACKED,
                last_update_us=t_us,
            )
            self._filters[cid] = f
        self._last_t_us = t_us
        return self._frame(t_us, False)

    def _observe(self, track: MarkerTrack, obs: np.ndarray, t_us: int, dt: float) -> None:
        if dt > 0:
            track.velocity = (obs - track.position_raw) / dt
        track.position_raw = obs.copy()
        track.position_smoothed = self._filters[track.controller_id].push(obs)
        track.status = TrackStatus.TRACKED
        track.last_update_us = t_us

    def _miss(self, track: MarkerTrack, t_us: int, dt: float) -> None:
        if track.status == TrackStatus.LOST:
            return
        if t_us - track.last_update_us > self.coast_limit_us:
            track.status = TrackStatus.LOST
            return
        track.status = TrackStatus.COASTING
        track.position_raw = track.position_raw + track.velocity * dt
        track.position_smoothed = self._filters[track.controller_id].push(track.position_raw)

    def _frame(self, t_us: int, ambiguous: bool) -> TrackerFrame:
        views = tuple(
            MarkerTrack(
                controller_id=t.controller_id,
                position_raw=t.position_raw.copy(),
                position_smoothed=t.position_smoothed.copy(),
                velocity=t.velocity.copy(),
                status=t.status,
                last_update_us=t.last_update_us,
            )
            for _, t in sorted(self.tracks.items())
        )
        return TrackerFrame(t_us=t_us, tracks=views, ambiguous=ambiguous)
