"""Hand-traced command scripts for the task layer.

Every tick of these scripts is written out so the resulting event sequence
can be predicted by hand: grasp ticks, handover ticks, placement ticks, and
fall durations are all fixed offsets. Used as the oracle for metrics tests.
"""

import numpy as np

from pegtrainer.math3d import RigidTransform, quat_identity

GRIP = np.array([0.012, 0.0, 0.0])      # a point on the ring's center circle
PARK0 = np.array([-0.11, 0.10, 0.08])   # rest positions far from every ring
PARK1 = np.array([0.11, 0.10, 0.08])
MID0 = np.array([0.012, 0.06, 0.0])     # carry pose: ring centered at (0, 0.06, 0)
MID1 = np.array([-0.012, 0.06, 0.0])

TRANSFER_TICKS = 7       # ticks per transfer routine
DROP_ROUTINE_TICKS = 16  # grasp, carry, release, and the full fall
TRANSFER_DURATION_S = 0.05  # placement fires 5 ticks after the first grasp


def pose(p):
    return RigidTransform(quat_identity(), np.asarray(p, dtype=float))


def transfer_moves(ring_center, dest_peg):
    """One bimanual transfer: instrument 0 picks, hands over mid-air to 1."""
    gp = np.asarray(ring_center) + GRIP
    place1 = np.array([dest_peg.x - 0.012, 0.01, dest_peg.z])
    return [
        {0: (pose(gp), 0.0), 1: (pose(PARK1), 0.0)},
        {0: (pose(gp), 1.0), 1: (pose(PARK1), 0.0)},      # grasp
        {0: (pose(MID0), 1.0), 1: (pose(PARK1), 0.0)},
        {0: (pose(MID0), 1.0), 1: (pose(MID1), 1.0)},     # handover starts
        {0: (pose(MID0), 0.0), 1: (pose(MID1), 1.0)},     # handover completes
        {0: (pose(PARK0), 0.0), 1: (pose(place1), 1.0)},
        {0: (pose(PARK0), 0.0), 1: (pose(place1), 0.0)},  # placement + transfer
    ]


def drop_moves(ring_center):
    """Pick a ring up, carry it to mid-air over no peg, and let it fall."""
    gp = np.asarray(ring_center) + GRIP
    hold = np.array([0.012, 0.05, 0.0])  # ring center (0, 0.05, 0): 11-tick fall
    moves = [
        {0: (pose(gp), 0.0), 1: (pose(PARK1), 0.0)},
        {0: (pose(gp), 1.0), 1: (pose(PARK1), 0.0)},      # grasp
        {0: (pose(hold), 1.0), 1: (pose(PARK1), 0.0)},
        {0: (pose(hold), 0.0), 1: (pose(PARK1), 0.0)},    # release into free fall
    ]
    for _ in range(DROP_ROUTINE_TICKS - len(moves)):
        moves.append({0: (pose(PARK0), 0.0), 1: (pose(PARK1), 0.0)})
    return moves


def six_transfers_two_drops(pegs, rest_height=0.005):
    """The full oracle script: rings 0-5 left to right, then rings 0-1 dropped."""

    def rest(peg_id):
        return np.array([pegs[peg_id].x, rest_height, pegs[peg_id].z])

    commands = []
    for i in range(6):
        commands += transfer_moves(rest(i), pegs[6 + i])
    for peg_id in (6, 7):  # rings 0 and 1 now rest on these
        commands += drop_moves(rest(peg_id))
    return commands


def expected_path_lengths(commands, start_tips):
    """Polyline length of the commanded tip positions, per instrument."""
    totals = {}
    current = {iid: np.asarray(p, dtype=float).copy() for iid, p in start_tips.items()}
    for iid in current:
        totals[iid] = 0.0
    for tick in commands:
        for iid, (p, _jaw) in tick.items():
            totals[iid] += float(np.linalg.norm(p.translation - current[iid]))
            current[iid] = p.translation.copy()
    return totals
