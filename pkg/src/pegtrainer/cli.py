"""Command-line interface: tracking, headless runs, synthesis, serving.

One executable with subcommands; every command is deterministic for fixed
inputs, so reports and CSVs can be compared byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calib import default_calibration, load_calibration, save_calibration
from .engine import run_replay, run_replay_session, run_tracking, write_pose_csv
from .replay import read_replay, write_replay
from .reports import render_report
from .sceneconfig import SceneConfig, load_scene_config
from .synth import SCENARIOS, NoiseSpec, synth_session, write_truth


def _load_calib(path):
    return load_calibration(path) if path else default_calibration()


def _load_scene(path) -> SceneConfig:
    return load_scene_config(path) if path else SceneConfig()


def _cmd_track(args) -> int:
    replay_path = Path(args.replay)
    records = read_replay(replay_path)
    rows = run_tracking(records, _load_calib(args.calib),
                        frames_base=replay_path.parent)
    write_pose_csv(rows, args.out)
    return 0


def _cmd_run(args) -> int:
    calib = _load_calib(args.calib)
    scene = _load_scene(args.scene)
    if len(args.replay) == 1:
        path = Path(args.replay[0])
        report = run_replay(read_replay(path), calib, scene,
                            frames_base=path.parent)
    else:
        report = run_replay_session(args.replay, calib, scene)
    text = render_report(report)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    noise = NoiseSpec(blob_px=args.noise_px)
    records, truth = synth_session(
        args.scenario, calib=_load_calib(args.calib), noise=noise,
        seed=args.seed, duration_s=args.duration_s,
        render_dir=(out / "frames") if args.render else None,
    )
    write_replay(records, out / "replay.jsonl")
    write_truth(truth, out / "truth.jsonl")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve  # imports the server stack only when serving

    serve(port=args.port, scene=_load_scene(args.scene),
          calib=_load_calib(args.calib), host=args.host,
          input_mode=args.input, ui_dir=args.ui_dir)
    return 0


def _cmd_calib_init(args) -> int:
    save_calibration(default_calibration(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pegtrainer",
        description="Deterministic peg-transfer dexterity trainer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="tracking-only pass over a replay")
    track.add_argument("--replay", required=True, help="replay .jsonl file")
    track.add_argument("--calib", help="calibration file (default rig if omitted)")
    track.add_argument("--out", required=True, help="pose CSV output path")
    track.set_defaults(func=_cmd_track)

    run = sub.add_parser("run", help="full engine, headless")
    run.add_argument("--replay", required=True, action="append",
                     help="replay file; repeat once per trial for a session")
    run.add_argument("--calib", help="calibration file")
    run.add_argument("--scene", help="scene config file")
    run.add_argument("--report", help="report output path (stdout if omitted)")
    run.set_defaults(func=_cmd_run)

    synth = sub.add_parser("synth", help="generate a synthetic session")
    synth.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--noise-px", type=float, default=0.0,
                       help="blob noise sigma in pixels")
    synth.add_argument("--duration-s", type=float, default=10.0)
    synth.add_argument("--calib", help="calibration file")
    synth.add_argument("--render", action="store_true",
                       help="write PGM frames instead of blob records")
    synth.add_argument("--out", required=True, help="output directory")
    synth.set_defaults(func=_cmd_synth)

    serve = sub.add_parser("serve", help="live simulation service")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--scene", help="scene config file")
    serve.add_argument("--calib", help="calibration file")
    serve.add_argument("--input", choices=["pose", "raw"], default="pose",
                       help="pose: clients send controller poses; "
                            "raw: packets and blob records feed the tracker")
    serve.add_argument("--ui-dir", help="directory of built client assets to "
                                        "serve at the web root")
    serve.set_defaults(func=_cmd_serve)

    calib = sub.add_parser("calib", help="calibration file utilities")
    calib_sub = calib.add_subparsers(dest="calib_command", required=True)
    calib_init = calib_sub.add_parser("init", help="write the default calibration")
    calib_init.add_argument("--out", required=True)
    calib_init.set_defaults(func=_cmd_calib_init)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
