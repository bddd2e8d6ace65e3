"""Trial protocol and metric reduction tests."""

import numpy as np
import pytest
from scripted import (
    TRANSFER_DURATION_S,
    expected_path_lengths,
    drop_moves,
    pose,
    six_transfers_two_drops,
)

from pegtrainer.pegtask import Event, PegTransferTask
from pegtrainer.trial import (
    SessionReport,
    TrialProtocol,
    TrialReport,
    compute_metrics,
    improvement_series,
    run_session,
    run_trial,
)


class TestComputeMetrics:
    def test_straight_line_path(self):
        pts = [np.array([0.0, 0.0, 0.0]), np.array([0.1, 0.0, 0.0]),
               np.array([0.3, 0.0, 0.0])]
        report = compute_metrics([], {0: pts, 1: [pts[0]]})
        assert abs(report.total_path_length_m - 0.30) < 1e-9
        assert report.transfers == 0
        assert report.drops == 0
        assert report.avg_transfer_time_s is None

    def test_counts_come_from_events(self):
        events = [
            Event(10_000, "transfer", {"duration_s": 2.0}),
            Event(20_000, "transfer", {"duration_s": 4.0}),
            Event(30_000, "drop", {}),
            Event(40_000, "grasp", {}),
        ]
        report = compute_metrics(events, {})
        assert report.transfers == 2
        assert report.drops == 1
        assert report.avg_transfer_time_s == 3.0


class TestTrialReportValidation:
    def test_avg_must_track_transfer_count(self):
        with pytest.raises(ValueError):
            TrialReport(0, 180.0, 0, 0, 1.5, 0.0, {}, ())
        with pytest.raises(ValueError):
            TrialReport(0, 180.0, 2, 0, None, 0.0, {}, ())

    def test_event_beyond_window_rejected(self):
        late = Event(181_000_000, "drop", {})
        with pytest.raises(ValueError):
            TrialReport(0, 180.0, 0, 0, None, 0.0, {}, (late,))

    def test_protocol_validation(self):
        with pytest.raises(ValueError):
            TrialProtocol(trial_s=0.0)
        with pytest.raises(ValueError):
            TrialProtocol(trials=0)


class TestRunTrial:
    def test_empty_stream_full_duration(self):
        task = PegTransferTask()
        report = run_trial(task, [], TrialProtocol())
        assert report.duration_s == 180.0
        assert report.transfers == 0
        assert report.drops == 0
        assert report.avg_transfer_time_s is None
        assert report.total_path_length_m == 0.0
        assert report.events == ()
        assert report.truncated
        assert task.t_us == 180_000_000

    def test_exactly_sized_stream_not_truncated(self):
        task = PegTransferTask()
        protocol = TrialProtocol(trial_s=0.5)
        report = run_trial(task, [{}] * 50, protocol)
        assert not report.truncated

    def test_scripted_six_transfers_two_drops(self):
        task = PegTransferTask()
        commands = six_transfers_two_drops(task.pegs, task.config.ring_rest_height)
        report = run_trial(task, commands, TrialProtocol(trial_s=2.0), trial_id=3)
        assert report.trial_id == 3
        assert report.transfers == 6
        assert report.drops == 2
        assert abs(report.avg_transfer_time_s - TRANSFER_DURATION_S) < 1e-12
        start_tips = {0: [-0.06, 0.011, 0.0], 1: [0.06, 0.011, 0.0]}
        expected = expected_path_lengths(commands, start_tips)
        for iid, length in expected.items():
            assert abs(report.path_length_by_instrument[iid] - length) < 1e-9
        assert abs(report.total_path_length_m - sum(expected.values())) < 1e-9

    def test_event_timestamps_relative_and_ordered(self):
        task = PegTransferTask()
        commands = six_transfers_two_drops(task.pegs, task.config.ring_rest_height)
        report = run_trial(task, commands, TrialProtocol(trial_s=2.0))
        times = [e.t_us for e in report.events]
        assert times == sorted(times)
        assert times[0] >= 0
        assert times[-1] <= 2_000_000

    def test_hard_stop_excludes_late_events(self):
        # release near the end of the window: the fall finishes next trial
        task = PegTransferTask()
        rest = [task.pegs[0].x, task.config.ring_rest_height, task.pegs[0].z]
        commands = [{} for _ in range(90)] + drop_moves(rest)
        first = run_trial(task, commands, TrialProtocol(trial_s=1.0))
        assert first.drops == 0
        assert all(e.t_us <= 1_000_000 for e in first.events)
        second = run_trial(task, [], TrialProtocol(trial_s=1.0))
        assert second.drops == 1
        drop = next(e for e in second.events if e.kind == "drop")
        assert 0 < drop.t_us <= 200_000

    def test_path_length_additive_across_split(self):
        rng = np.random.default_rng(5)
        steps = [rng.uniform(-0.005, 0.005, size=3) for _ in range(200)]
        base = np.array([-0.06, 0.05, 0.0])

        def walk_commands():
            p = base.copy()
            out = []
            for d in steps:
                p = p + d
                out.append({0: (pose(p), 0.0)})
            return out

        whole_task = PegTransferTask()
        whole = run_trial(whole_task, walk_commands(), TrialProtocol(trial_s=2.0))

        split_task = PegTransferTask()
        cmds = walk_commands()
        first = run_trial(split_task, cmds[:100], TrialProtocol(trial_s=1.0))
        second = run_trial(split_task, cmds[100:], TrialProtocol(trial_s=1.0))
        assert abs(
            (first.total_path_length_m + second.total_path_length_m)
            - whole.total_path_length_m
        ) < 1e-12

    def test_deterministic_reports(self):
        def make():
            task = PegTransferTask()
            commands = six_transfers_two_drops(task.pegs, task.config.ring_rest_height)
            return run_trial(task, commands, TrialProtocol(trial_s=2.0))

        a, b = make(), make()
        assert a.events == b.events
        assert a.total_path_length_m == b.total_path_length_m
        assert a.avg_transfer_time_s == b.avg_transfer_time_s


class TestImprovements:
    def test_reference_series(self):
        assert improvement_series([100, 108, 121], lower_is_better=False) == (8.0, 21.0)
        assert improvement_series([100, 89, 67], lower_is_better=True) == (11.0, 33.0)

    def test_zero_baseline_is_undefined(self):
        assert improvement_series([0, 5], lower_is_better=False) == (None,)
        assert improvement_series([0, 0, 3], lower_is_better=True) == (None, None)


class TestRunSession:
    def test_three_trials_with_improvements(self):
        protocol = TrialProtocol(trial_s=2.0, trials=3)
        streams = []
        for drops_wanted in (2, 1, 0):
            task_probe = PegTransferTask()
            rest = [task_probe.pegs[0].x, task_probe.config.ring_rest_height,
                    task_probe.pegs[0].z]
            commands = []
            for _ in range(drops_wanted):
                commands += drop_moves(rest)
                commands += [{} for _ in range(110)]  # wait out the respawn
            streams.append(commands)
        report = run_session(PegTransferTask, streams, protocol)
        assert isinstance(report, SessionReport)
        assert [r.drops for r in report.trials] == [2, 1, 0]
        assert report.drop_improvement_pct == (50.0, 100.0)
        assert report.transfer_improvement_pct == (None, None)
        assert [r.trial_id for r in report.trials] == [0, 1, 2]

    def test_stream_count_must_match_protocol(self):
        with pytest.raises(ValueError):
            run_session(PegTransferTask, [[]], TrialProtocol(trials=3, trial_s=0.5))
