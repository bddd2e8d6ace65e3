"""Recording and replay of sensor streams.

Line-delimited JSON, one record per line, globally time-ordered. Three
record kinds:

    {"kind": "imu", "t_us": ..., "controller": 0, "gyro": [...], "accel": [...],
     "button": false, "jaw": 0.0}
    {"kind": "blobs", "t_us": ..., "left": [[u, v], ...], "right": [[u, v], ...]}
    {"kind": "frames", "t_us": ..., "left_path": "...", "right_path": "..."}

The imu records carry the full controller packet payload (button and jaw
included) so one file drives the whole engine. Frame records point at PGM
files on disk relative to the replay file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

RECORD_KINDS = ("imu", "blobs", "frames")


@dataclass(frozen=True)
class ImuRecord:
    t_us: int
    controller: int
    gyro: tuple[float, float, float]
    accel: tuple[float, float, float]
    button: bool = False
    jaw: float = 0.0
    kind: str = field(default="imu", init=False)

    def __post_init__(self):
        if self.controller not in (0, 1):
            raise ValueError("controller must be 0 or 1")
        if len(self.gyro) != 3 or len(self.accel) != 3:
            raise ValueError("gyro and accel must have 3 components")
        object.__setattr__(self, "gyro", tuple(float(v) for v in self.gyro))
        object.__setattr__(self, "accel", tuple(float(v) for v in self.accel))


@dataclass(frozen=True)
class BlobsRecord:
    t_us: int
    left: tuple[tuple[float, float], ...]   # pixel centroids, either camera
    right: tuple[tuple[float, float], ...]
    kind: str = field(default="blobs", init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "left", tuple((float(u), float(v)) for u, v in self.left)
        )
        object.__setattr__(
            self, "right", tuple((float(u), float(v)) for u, v in self.right)
        )


@dataclass(frozen=True)
class FramesRecord:
    t_us: int
    left_path: str
    right_path: str
    kind: str = field(default="frames", init=False)


ReplayRecord = ImuRecord | BlobsRecord | FramesRecord


def record_to_json(record: ReplayRecord) -> dict:
    if isinstance(record, ImuRecord):
        return {
            "kind": "imu", "t_us": record.t_us, "controller": record.controller,
            "gyro": list(record.gyro), "accel": list(record.accel),
            "button": record.button, "jaw": record.jaw,
        }
    if isinstance(record, BlobsRecord):
        return {
            "kind": "blobs", "t_us": record.t_us,
            "left": [list(p) for p in record.left],
            "right": [list(p) for p in record.right],
        }
    if isinstance(record, FramesRecord):
        return {
            "kind": "frames", "t_us": record.t_us,
            "left_path": record.left_path, "right_path": record.right_path,
        }
    raise TypeError(f"not a replay record: {type(record).__name__}")


def record_from_json(obj: dict) -> ReplayRecord:
    kind = obj.get("kind")
    if kind == "imu":
        return ImuRecord(
            t_us=int(obj["t_us"]), controller=int(obj["controller"]),
            gyro=tuple(obj["gyro"]), accel=tuple(obj["accel"]),
            button=bool(obj.get("button", False)), jaw=float(obj.get("jaw", 0.0)),
        )
    if kind == "blobs":
        return BlobsRecord(
            t_us=int(obj["t_us"]),
            left=tuple((u, v) for u, v in obj["left"]),
            right=tuple((u, v) for u, v in obj["right"]),
        )
    if kind == "frames":
        return FramesRecord(
            t_us=int(obj["t_us"]),
            left_path=str(obj["left_path"]), right_path=str(obj["right_path"]),
        )
    raise ValueError(f"unknown replay record kind {kind!r}")


def write_replay(records, path) -> None:
    """Write records to a line-delimited file, enforcing global time order."""
    path = Path(path)
    last_t = -1
    with path.open("w") as fh:
        for record in records:
            if record.t_us < last_t:
                raise ValueError(
                    f"records out of order: {record.t_us} after {last_t}"
                )
            last_t = record.t_us
            fh.write(json.dumps(record_to_json(record), separators=(",", ":"))
                     + "\n")


def read_replay(path) -> list[ReplayRecord]:
    """Read and validate a replay file; records must be time-ordered."""
    path = Path(path)
    records: list[ReplayRecord] = []
    last_t = -1
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = record_from_json(json.loads(line))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad replay record: {exc}") from exc
        if record.t_us < last_t:
            raise ValueError(
                f"{path}:{lineno}: records out of order "
                f"({record.t_us} after {last_t})"
            )
        last_t = record.t_us
        records.append(record)
    return records


def merge_streams(*streams) -> list[ReplayRecord]:
    """Merge several time-ordered record lists into one, stably by t_us."""
    merged = [r for stream in streams for r in stream]
    merged.sort(key=lambda r: r.t_us)
    return merged
