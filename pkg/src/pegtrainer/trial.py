"""Timed-trial protocol and scoring.

A trial steps the task at its fixed rate for a fixed duration, collecting
events and tip trajectories, then reduces them to four metrics: transfer
count, drop count, mean transfer time, and total tip path length. A session
is several trials with improvement percentages relative to the first.

Familiarization time and the breaks between trials are protocol metadata
only; nothing is simulated during them, so back-to-back trials produce the
same reports as spaced ones.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .pegtask import Event, PegTransferTask
from .teleop import TipTarget


@dataclass(frozen=True)
class TrialProtocol:
    familiarization_s: float = 300.0
    trial_s: float = 180.0
    trials: int = 3
    break_s: float = 60.0

    def __post_init__(self):
        if self.trial_s <= 0 or self.trials < 1:
            raise ValueError("trial_s must be positive and trials >= 1")
        if self.familiarization_s < 0 or self.break_s < 0:
            raise ValueError("familiarization_s and break_s must be non-negative")


@dataclass(frozen=True)
class TrialReport:
    trial_id: int
    duration_s: float
    transfers: int
    drops: int
    avg_transfer_time_s: float | None   # None when no transfer was counted
    total_path_length_m: float
    path_length_by_instrument: dict[int, float]
    events: tuple[Event, ...]           # timestamps relative to trial start
    truncated: bool = False             # input stream ended before the trial did

    def __post_init__(self):
        if (self.transfers == 0) != (self.avg_transfer_time_s is None):
            raise ValueError("avg_transfer_time_s must be None exactly when transfers == 0")
        limit_us = int(round(self.duration_s * 1e6))
        for e in self.events:
            if not 0 <= e.t_us <= limit_us:
                raise ValueError("event timestamp outside the trial window")
        if abs(self.total_path_length_m
               - sum(self.path_length_by_instrument.values())) > 1e-9:
            raise ValueError("total path length must sum the per-instrument lengths")


@dataclass(frozen=True)
class SessionReport:
    trials: tuple[TrialReport, ...]
    protocol: TrialProtocol
    transfer_improvement_pct: tuple[float | None, ...]  # trial k vs trial 1
    drop_improvement_pct: tuple[float | None, ...]


def compute_metrics(events, tip_positions, trial_id: int = 0,
                    duration_s: float = 180.0, truncated: bool = False) -> TrialReport:
    """Reduce an event list and per-instrument tip trajectories to a report."""
    events = tuple(events)
    transfer_times = [float(e.data["duration_s"]) for e in events if e.kind == "transfer"]
    drops = sum(1 for e in events if e.kind == "drop")
    avg = sum(transfer_times) / len(transfer_times) if transfer_times else None
    per_instrument = {}
    for iid in sorted(tip_positions):
        pts = np.asarray(tip_positions[iid], dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            per_instrument[iid] = 0.0
        else:
            per_instrument[iid] = float(
                np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1))
            )
    return TrialReport(
        trial_id=trial_id,
        duration_s=duration_s,
        transfers=len(transfer_times),
        drops=drops,
        avg_transfer_time_s=avg,
        total_path_length_m=sum(per_instrument.values()),
        path_length_by_instrument=per_instrument,
        events=events,
        truncated=truncated,
    )


def _step(task: PegTransferTask, commands: dict) -> list[Event]:
    if commands and isinstance(next(iter(commands.values())), TipTarget):
        return task.sim_step_targets(commands)
    return task.sim_step(commands)


def run_trial(task: PegTransferTask, inputs, protocol: TrialProtocol = TrialProtocol(),
              trial_id: int = 0) -> TrialReport:
    """Step the task for one timed trial, driven by per-tick command dicts.

    `inputs` yields one dict per tick, mapping instrument id to either a
    (pose, jaw) pair or a TipTarget. A stream that ends early leaves the
    scene coasting (no new commands) until the trial clock runs out and
    marks the report truncated. Event recording hard-stops at the trial
    duration; the returned timestamps are relative to trial start.
    """
    ticks = int(round(protocol.trial_s / task.config.tick_dt))
    t0 = task.t_us
    positions = {
        iid: [inst.tip_pose.translation.copy()]
        for iid, inst in task.instruments.items()
    }
    collected: list[Event] = []
    truncated = False
    stream = iter(inputs)
    for _ in range(ticks):
        try:
            commands = next(stream)
        except StopIteration:
            truncated = True
            commands = {}
        collected.extend(_step(task, commands))
        for iid, inst in task.instruments.items():
            positions[iid].append(inst.tip_pose.translation.copy())
    rebased = [replace(e, t_us=e.t_us - t0) for e in collected]
    return compute_metrics(rebased, positions, trial_id=trial_id,
                           duration_s=protocol.trial_s, truncated=truncated)


def improvement_series(values, lower_is_better: bool) -> tuple[float | None, ...]:
    """Percent change of each later value against the first.

    Higher transfer counts and lower drop counts both come out positive.
    A zero baseline makes the percentage undefined (None).
    """
    first = values[0]
    out = []
    for v in values[1:]:
        if first == 0:
            out.append(None)
        elif lower_is_better:
            out.append((first - v) / first * 100.0)
        else:
            out.append((v - first) / first * 100.0)
    return tuple(out)


def run_session(task_factory, input_streams, protocol: TrialProtocol = TrialProtocol()
                ) -> SessionReport:
    """Run the full multi-trial protocol, one fresh task per trial."""
    if len(input_streams) != protocol.trials:
        raise ValueError(
            f"protocol expects {protocol.trials} input streams, got {len(input_streams)}"
        )
    reports = tuple(
        run_trial(task_factory(), stream, protocol, trial_id=k)
        for k, stream in enumerate(input_streams)
    )
    return SessionReport(
        trials=reports,
        protocol=protocol,
        transfer_improvement_pct=improvement_series(
            [r.transfers for r in reports], lower_is_better=False
        ),
        drop_improvement_pct=improvement_series(
            [r.drops for r in reports], lower_is_better=True
        ),
    )
