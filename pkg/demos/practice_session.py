"""Simulated practice arc: one synthetic user improving over three trials.

The synthetic user plays the full default protocol (3 x 180 s trials). Each
trial uses a higher skill setting: faster reaches, shorter hesitation,
fewer fumbled grasps. The session report shows the resulting learning
trend the same way a live session would.

Run:  python3 demos/practice_session.py
"""

from pegtrainer import render_report, synthetic_user_session


def main() -> None:
    session = synthetic_user_session()
    print("trial  transfers  drops  avg transfer  path length")
    for t in session.trials:
        avg = "-" if t.avg_transfer_time_s is None else f"{t.avg_transfer_time_s:6.2f} s"
        print(f"{t.trial_id + 1:5d}  {t.transfers:9d}  {t.drops:5d}"
              f"  {avg:>12}  {t.total_path_length_m:8.3f} m")
    print()
    for name, series in (("transfers", session.transfer_improvement_pct),
                         ("drops", session.drop_improvement_pct)):
        pretty = ", ".join("n/a" if v is None else f"{v:+.1f}%" for v in series)
        print(f"{name} vs trial 1: {pretty}")
    print()
    print("full report document:")
    print(render_report(session), end="")


if __name__ == "__main__":
    main()
