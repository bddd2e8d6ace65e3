"""Deterministic bimanual peg-transfer task simulation.

Fixed-step kinematic simulation: grasped rings rigidly follow the grasping
tip, released rings either snap onto a nearby peg or fall under gravity
(explicit Euler, position updated with the pre-step velocity), and dropped
rings respawn on the peg they last rested on after a fixed delay. There is
no contact dynamics and no instrument collision; every transition is an
explicit rule so event sequences are exactly reproducible.

Transfers are counted when a ring is placed on the side opposite the one it
was picked from, by default only when a mid-air handover occurred
(both jaws holding the ring at once, then the first releasing).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .kinematics import (
    HOME,
    InstrumentModel,
    ReachabilityError,
    default_instruments,
    forward_kinematics,
    solve_ik,
)
from .math3d import RigidTransform, quat_identity
from .teleop import TipTarget

GRAVITY = 9.81
LEFT_SIDE = "left"
RIGHT_SIDE = "right"


@dataclass(frozen=True)
class TaskConfig:
    peg_height: float = 0.015
    peg_capture_radius: float = 0.008
    ring_circle_radius: float = 0.012
    ring_rest_height: float = 0.005
    grasp_radius: float = 0.006
    jaw_close_threshold: float = 0.7
    jaw_open_threshold: float = 0.3
    placement_height_margin: float = 0.02
    respawn_delay_s: float = 1.0
    tick_dt: float = 0.01
    require_handover: bool = True

    def __post_init__(self):
        if not 0 <= self.jaw_open_threshold < self.jaw_close_threshold <= 1:
            raise ValueError("jaw thresholds must satisfy 0 <= open < close <= 1")
        if self.tick_dt <= 0:
            raise ValueError("tick_dt must be positive")


@dataclass(frozen=True)
class Peg:
    peg_id: int
    x: float
    z: float

    @property
    def side(self) -> str:
        return LEFT_SIDE if self.x < 0 else RIGHT_SIDE


def default_pegs() -> tuple[Peg, ...]:
    """Two columns of three pegs per side, mirrored about x=0."""
    left = [(x, z) for x in (-0.09, -0.05) for z in (-0.04, 0.0, 0.04)]
    right = [(-x, z) for x, z in left]
    return tuple(Peg(i, x, z) for i, (x, z) in enumerate(left + right))


class RingStateKind(Enum):
    ON_PEG = "on_peg"
    GRASPED = "grasped"
    GRASPED_BOTH = "grasped_both"
    FALLING = "falling"
    RESPAWNING = "respawning"


@dataclass
class RingState:
    ring_id: int
    pose: RigidTransform
    kind: RingStateKind
    peg_id: int | None = None          # set while ON_PEG
    holders: list[int] = field(default_factory=list)   # grasping instruments, newest last
    grip: RigidTransform | None = None  # ring pose in the newest holder's tip frame
    velocity: np.ndarray | None = None  # set while FALLING
    respawn_timer_s: float = 0.0        # set while RESPAWNING
    home_peg: int = 0                   # peg the ring last rested on


@dataclass(frozen=True)
class TransferRecord:
    ring_id: int
    t_first_grasp_us: int
    t_placed_us: int
    handover_occurred: bool
    source_peg: int
    dest_peg: int

    def __post_init__(self):
        if self.t_placed_us <= self.t_first_grasp_us:
            raise ValueError("placement must come after the first grasp")


def classify_transfer(record: TransferRecord, pegs, require_handover: bool = True) -> bool:
    """A transfer counts when the ring changed sides, optionally requiring a handover."""
    source_side = pegs[record.source_peg].side
    dest_side = pegs[record.dest_peg].side
    if source_side == dest_side:
        return False
    return record.handover_occurred or not require_handover


@dataclass(frozen=True)
class Event:
    t_us: int
    kind: str
    data: dict


@dataclass
class _Attempt:
    t_first_grasp_us: int
    source_peg: int
    handover_occurred: bool = False


@dataclass
class _InstrumentState:
    model: InstrumentModel
    q: np.ndarray
    jaw: float = 0.0
    jaw_closed: bool = False
    tip_pose: RigidTransform | None = None
    path_length_m: float = 0.0

    def __post_init__(self):
        if self.tip_pose is None:
            self.tip_pose = forward_kinematics(self.model, self.q)


def _ring_circle_distance(tip_pos: np.ndarray, ring_pose: RigidTransform,
                          circle_radius: float) -> float:
    """Distance from a point to the ring's center circle."""
    local = ring_pose.inverse().apply(tip_pos)
    radial = float(np.hypot(local[0], local[2]))
    return float(np.hypot(radial - circle_radius, local[1]))


class PegTransferTask:
    """Scene state plus the grasp/release/fall rule set, stepped at a fixed rate."""

    def __init__(self, config: TaskConfig = TaskConfig(),
                 instruments: dict[int, InstrumentModel] | None = None,
                 pegs: tuple[Peg, ...] | None = None,
                 camera_pose: RigidTransform | None = None):
        self.config = config
        self.pegs = pegs if pegs is not None else default_pegs()
        if instruments is None:
            instruments = default_instruments()
        self.instruments = {
            iid: _InstrumentState(model=m, q=HOME.copy())
            for iid, m in sorted(instruments.items())
        }
        self.camera_pose = camera_pose if camera_pose is not None else RigidTransform(
            quat_identity(), np.array([0.0, 0.25, 0.35])
        )
        left_pegs = [p for p in self.pegs if p.side == LEFT_SIDE]
        self.rings = [
            RingState(
                ring_id=i,
                pose=self._peg_rest_pose(p.peg_id),
                kind=RingStateKind.ON_PEG,
                peg_id=p.peg_id,
                home_peg=p.peg_id,
            )
            for i, p in enumerate(left_pegs[:6])
        ]
        self.t_us = 0
        self.events: list[Event] = []
        self.records: list[TransferRecord] = []
        self.counted_transfers: list[TransferRecord] = []
        self._attempts: dict[int, _Attempt] = {}
        self._check_invariants()

    # ---- geometry helpers ----

    def _peg_rest_pose(self, peg_id: int) -> RigidTransform:
        peg = self.pegs[peg_id]
        return RigidTransform(
            quat_identity(),
            np.array([peg.x, self.config.ring_rest_height, peg.z]),
        )

    def _nearest_peg(self, position: np.ndarray) -> tuple[Peg, float]:
        best, best_d = None, np.inf
        for peg in self.pegs:
            d = float(np.hypot(position[0] - peg.x, position[2] - peg.z))
            if d < best_d:
                best, best_d = peg, d
        return best, best_d

    def ring_side(self, ring: RingState) -> str:
        return self.pegs[ring.home_peg].side

    # ---- event plumbing ----

    def _emit(self, kind: str, **data) -> Event:
        ev = Event(t_us=self.t_us, kind=kind, data=data)
        self.events.append(ev)
        return ev

    # ---- grasp/release rules ----

    def try_grasp(self, instrument_id: int) -> Event | None:
        """Grasp the nearest ring if its center circle is within reach of the tip."""
        inst = self.instruments[instrument_id]
        for ring in self.rings:
            if instrument_id in ring.holders:
                return None  # this jaw is already holding something
        candidates = [
            r for r in self.rings
            if r.kind in (RingStateKind.ON_PEG, RingStateKind.FALLING,
                          RingStateKind.GRASPED)
        ]
        if not candidates:
            return None
        tip = inst.tip_pose.translation
        dists = [
            (_ring_circle_distance(tip, r.pose, self.config.ring_circle_radius), r.ring_id, r)
            for r in candidates
        ]
        dist, _, ring = min(dists, key=lambda t: (t[0], t[1]))
        if dist > self.config.grasp_radius:
            return None

        if ring.kind == RingStateKind.ON_PEG:
            self._attempts[ring.ring_id] = _Attempt(
                t_first_grasp_us=self.t_us, source_peg=ring.peg_id
            )
            ring.peg_id = None
        elif ring.ring_id not in self._attempts:
            self._attempts[ring.ring_id] = _Attempt(
                t_first_grasp_us=self.t_us, source_peg=ring.home_peg
            )

        was_grasped = ring.kind == RingStateKind.GRASPED
        ring.holders.append(instrument_id)
        ring.grip = inst.tip_pose.inverse().compose(ring.pose)
        ring.velocity = None
        if was_grasped:
            ring.kind = RingStateKind.GRASPED_BOTH
            return self._emit("handover_started", ring_id=ring.ring_id,
                              instrument_id=instrument_id)
        ring.kind = RingStateKind.GRASPED
        return self._emit("grasp", ring_id=ring.ring_id, instrument_id=instrument_id)

    def release(self, instrument_id: int) -> Event | None:
        """Open the jaw: handover completion, placement onto a peg, or free fall."""
        ring = next((r for r in self.rings if instrument_id in r.holders), None)
        if ring is None:
            return None
        ring.holders.remove(instrument_id)

        if ring.kind == RingStateKind.GRASPED_BOTH:
            keeper = ring.holders[-1]
            ring.kind = RingStateKind.GRASPED
            ring.grip = self.instruments[keeper].tip_pose.inverse().compose(ring.pose)
            attempt = self._attempts.get(ring.ring_id)
            if attempt is not None:
                attempt.handover_occurred = True
            return self._emit("handover_completed", ring_id=ring.ring_id,
                              instrument_id=keeper)

        pos = ring.pose.translation
        peg, horiz = self._nearest_peg(pos)
        height_ok = 0.0 < pos[1] < self.config.peg_height + self.config.placement_height_margin
        if horiz < self.config.peg_capture_radius and height_ok:
            return self._place(ring, peg)
        ring.kind = RingStateKind.FALLING
        ring.grip = None
        ring.velocity = np.zeros(3)
        return self._emit("released_free", ring_id=ring.ring_id,
                          instrument_id=instrument_id)

    def _place(self, ring: RingState, peg: Peg) -> Event:
        ring.kind = RingStateKind.ON_PEG
        ring.peg_id = peg.peg_id
        ring.grip = None
        ring.velocity = None
        ring.pose = self._peg_rest_pose(peg.peg_id)
        ev = self._emit("placement", ring_id=ring.ring_id, peg_id=peg.peg_id)
        attempt = self._attempts.pop(ring.ring_id, None)
        if attempt is not None:
            record = TransferRecord(
                ring_id=ring.ring_id,
                t_first_grasp_us=attempt.t_first_grasp_us,
                t_placed_us=self.t_us,
                handover_occurred=attempt.handover_occurred,
                source_peg=attempt.source_peg,
                dest_peg=peg.peg_id,
            )
            self.records.append(record)
            if classify_transfer(record, self.pegs, self.config.require_handover):
                self.counted_transfers.append(record)
                self._emit(
                    "transfer", ring_id=ring.ring_id,
                    source_peg=record.source_peg, dest_peg=record.dest_peg,
                    handover=record.handover_occurred,
                    duration_s=(record.t_placed_us - record.t_first_grasp_us) / 1e6,
                )
        ring.home_peg = peg.peg_id
        return ev

    def _drop(self, ring: RingState) -> Event:
        ring.kind = RingStateKind.RESPAWNING
        ring.respawn_timer_s = self.config.respawn_delay_s
        ring.velocity = None
        p = ring.pose.translation.copy()
        p[1] = 0.0
        ring.pose = RigidTransform(ring.pose.rotation, p)
        self._attempts.pop(ring.ring_id, None)
        return self._emit("drop", ring_id=ring.ring_id)

    # ---- stepping ----

    def sim_step(self, tip_commands: dict[int, tuple[RigidTransform, float]]) -> list[Event]:
        """Advance one tick with exact tip poses (pose, jaw command in [0, 1]).

        Order within a tick: tips move, held rings follow, falling rings
        integrate and land, jaw edges fire grasp/release transitions,
        respawn timers count down.
        """
        start = len(self.events)
        dt = self.config.tick_dt
        self.t_us += int(round(dt * 1e6))
        respawning_at_entry = {
            r.ring_id for r in self.rings if r.kind == RingStateKind.RESPAWNING
        }

        for iid in sorted(self.instruments):
            inst = self.instruments[iid]
            if iid in tip_commands:
                pose, jaw = tip_commands[iid]
                inst.path_length_m += float(
                    np.linalg.norm(pose.translation - inst.tip_pose.translation)
                )
                inst.tip_pose = pose
                inst.jaw = min(max(float(jaw), 0.0), 1.0)

        for ring in self.rings:
            if ring.kind in (RingStateKind.GRASPED, RingStateKind.GRASPED_BOTH):
                holder = self.instruments[ring.holders[-1]]
                ring.pose = holder.tip_pose.compose(ring.grip)
            elif ring.kind == RingStateKind.FALLING:
                p = ring.pose.translation + ring.velocity * dt
                ring.velocity = ring.velocity + np.array([0.0, -GRAVITY, 0.0]) * dt
                ring.pose = RigidTransform(ring.pose.rotation, p)
                if p[1] <= 0.0:
                    peg, horiz = self._nearest_peg(p)
                    if horiz < self.config.peg_capture_radius:
                        self._place(ring, peg)
                    else:
                        self._drop(ring)

        for iid in sorted(self.instruments):
            self._apply_jaw_edges(iid)

        for ring in self.rings:
            if ring.kind == RingStateKind.RESPAWNING and ring.ring_id in respawning_at_entry:
                ring.respawn_timer_s -= dt
                if ring.respawn_timer_s <= 1e-9:
                    ring.kind = RingStateKind.ON_PEG
                    ring.peg_id = ring.home_peg
                    ring.respawn_timer_s = 0.0
                    ring.pose = self._peg_rest_pose(ring.home_peg)
                    self._emit("respawn", ring_id=ring.ring_id, peg_id=ring.home_peg)

        self._check_invariants()
        return self.events[start:]

    def sim_step_targets(self, targets: dict[int, TipTarget]) -> list[Event]:
        """Advance one tick, reaching each target pose through the inverse solver.

        Unreachable or unconverged targets leave the instrument at its
        previous joints for this tick (the solver's best effort is kept when
        it converges on a later tick).
        """
        commands: dict[int, tuple[RigidTransform, float]] = {}
        for iid, target in sorted(targets.items()):
            inst = self.instruments[iid]
            try:
                res = solve_ik(inst.model, target.pose, inst.q)
            except ReachabilityError:
                commands[iid] = (inst.tip_pose, target.jaw_command)
                continue
            if res.converged:
                inst.q = res.q
            commands[iid] = (
                forward_kinematics(inst.model, inst.q), target.jaw_command
            )
        return self.sim_step(commands)

    def _apply_jaw_edges(self, instrument_id: int) -> None:
        inst = self.instruments[instrument_id]
        if not inst.jaw_closed and inst.jaw >= self.config.jaw_close_threshold:
            inst.jaw_closed = True
            self.try_grasp(instrument_id)
        elif inst.jaw_closed and inst.jaw <= self.config.jaw_open_threshold:
            inst.jaw_closed = False
            self.release(instrument_id)

    # ---- introspection ----

    def total_path_length_m(self) -> float:
        return sum(i.path_length_m for i in self.instruments.values())

    def drop_count(self) -> int:
        return sum(1 for e in self.events if e.kind == "drop")

    def _check_invariants(self) -> None:
        assert len(self.rings) == 6, "ring count must stay constant"
        for ring in self.rings:
            if ring.kind == RingStateKind.ON_PEG:
                assert ring.peg_id is not None and not ring.holders
                peg = self.pegs[ring.peg_id]
                p = ring.pose.translation
                assert abs(p[0] - peg.x) < 1e-9 and abs(p[2] - peg.z) < 1e-9
            elif ring.kind == RingStateKind.GRASPED:
                assert len(ring.holders) == 1 and ring.grip is not None
            elif ring.kind == RingStateKind.GRASPED_BOTH:
                assert len(ring.holders) == 2
            elif ring.kind == RingStateKind.FALLING:
                assert ring.velocity is not None and not ring.holders
            elif ring.kind == RingStateKind.RESPAWNING:
                assert ring.respawn_timer_s >= 0.0 and not ring.holders
