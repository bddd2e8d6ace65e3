"""Regenerate test/fixtures/fk_cases.json from the engine's kinematic chain.

The browser client draws instruments from joint values with its own port of
the chain; these fixtures pin that port to the engine implementation. Run
from the repository root after any change to the chain:

    python3 frontend/tools/make_fk_fixtures.py
"""

import json
from pathlib import Path

import numpy as np

from pegtrainer.kinematics import default_instruments, forward_kinematics, wrist_point

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "fk_cases.json"
CASES_PER_INSTRUMENT = 50


def main() -> None:
    rng = np.random.default_rng(2024)
    doc = {"instruments": []}
    for iid, model in sorted(default_instruments().items()):
        lim = model.joint_limits
        cases = []
        for _ in range(CASES_PER_INSTRUMENT):
            q = lim[:, 0] + rng.random(6) * (lim[:, 1] - lim[:, 0])
            pose = forward_kinematics(model, q)
            cases.append({
                "q": [float(v) for v in q],
                "tip_p": [float(v) for v in pose.translation],
                "tip_q": [float(v) for v in pose.rotation],
                "wrist": [float(v) for v in wrist_point(model, q)],
            })
        doc["instruments"].append({
            "id": iid,
            "rcm_rotation": [float(v) for v in model.rcm_pose.rotation],
            "rcm_translation": [float(v) for v in model.rcm_pose.translation],
            "tip_length": model.tip_length,
            "cases": cases,
        })
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT} ({CASES_PER_INSTRUMENT} cases x {len(doc['instruments'])} instruments)")


if __name__ == "__main__":
    main()
