"""Scene configuration files: task rules, trial protocol, motion scaling,
and instrument pivot placement.

JSON with defaults for everything, so a config file only needs the keys it
overrides. Unknown keys are rejected to catch typos early.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .calib import pose_from_json, pose_to_json
from .kinematics import InstrumentModel, default_instruments
from .pegtask import PegTransferTask, TaskConfig
from .teleop import DEFAULT_CAMERA_TRANSLATION_SCALE, DEFAULT_TRANSLATION_SCALE
from .trial import TrialProtocol

SCENE_CONFIG_KIND = "scene_config"


@dataclass(frozen=True)
class SceneConfig:
    task: TaskConfig = TaskConfig()
    protocol: TrialProtocol = TrialProtocol()
    translation_scale: float = DEFAULT_TRANSLATION_SCALE
    camera_translation_scale: float = DEFAULT_CAMERA_TRANSLATION_SCALE
    instruments: dict[int, InstrumentModel] = field(default_factory=default_instruments)

    def make_task(self) -> PegTransferTask:
        return PegTransferTask(config=self.task, instruments=dict(self.instruments))


def default_scene_config() -> SceneConfig:
    return SceneConfig()


def scene_config_to_json(config: SceneConfig) -> dict:
    return {
        "kind": SCENE_CONFIG_KIND,
        "task": asdict(config.task),
        "protocol": asdict(config.protocol),
        "teleop": {
            "translation_scale": config.translation_scale,
            "camera_translation_scale": config.camera_translation_scale,
        },
        "instruments": {
            str(iid): pose_to_json(model.rcm_pose)
            for iid, model in sorted(config.instruments.items())
        },
    }


def _merged(section: dict, defaults, label: str) -> dict:
    allowed = set(asdict(defaults))
    unknown = set(section) - allowed
    if unknown:
        raise ValueError(f"unknown {label} keys: {sorted(unknown)}")
    merged = asdict(defaults)
    merged.update(section)
    return merged


def scene_config_from_json(obj: dict) -> SceneConfig:
    if obj.get("kind") != SCENE_CONFIG_KIND:
        raise ValueError(f"not a scene config document (kind={obj.get('kind')!r})")
    unknown = set(obj) - {"kind", "task", "protocol", "teleop", "instruments"}
    if unknown:
        raise ValueError(f"unknown scene config sections: {sorted(unknown)}")

    task = TaskConfig(**_merged(obj.get("task", {}), TaskConfig(), "task"))
    protocol = TrialProtocol(**_merged(obj.get("protocol", {}), TrialProtocol(), "protocol"))

    teleop = obj.get("teleop", {})
    unknown = set(teleop) - {"translation_scale", "camera_translation_scale"}
    if unknown:
        raise ValueError(f"unknown teleop keys: {sorted(unknown)}")

    instruments = default_instruments()
    for key, pose_obj in obj.get("instruments", {}).items():
        iid = int(key)
        if iid not in instruments:
            raise ValueError(f"instrument id {iid} must be 0 or 1")
        instruments[iid] = InstrumentModel(rcm_pose=pose_from_json(pose_obj))

    return SceneConfig(
        task=task,
        protocol=protocol,
        translation_scale=float(teleop.get("translation_scale",
                                           DEFAULT_TRANSLATION_SCALE)),
        camera_translation_scale=float(teleop.get("camera_translation_scale",
                                                  DEFAULT_CAMERA_TRANSLATION_SCALE)),
        instruments=instruments,
    )


def save_scene_config(config: SceneConfig, path) -> None:
    Path(path).write_text(json.dumps(scene_config_to_json(config), indent=2) + "\n")


def load_scene_config(path) -> SceneConfig:
    return scene_config_from_json(json.loads(Path(path).read_text()))
