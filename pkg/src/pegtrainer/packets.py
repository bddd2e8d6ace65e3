"""Fixed-size binary packets for the controller link.

Little-endian, 41 bytes:
[magic u8][controller u8][seq u16][t_us u64][gyro 3 f32][accel 3 f32][buttons u8][jaw f32]

Vector components and the jaw value are quantized to 32-bit floats at
construction, so decode(encode(p)) reproduces p exactly for every packet.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = 0xC7
PACKET_SIZE = 41
_LAYOUT = struct.Struct("<BBHQ3f3fBf")
BUTTON_MULTIFUNCTION = 0x01

assert _LAYOUT.size == PACKET_SIZE


def _f32(x: float) -> float:
    return float(np.float32(x))


@dataclass(frozen=True)
class ControllerPacket:
    controller_id: int
    seq: int                 # 16-bit wrap-around counter
    t_us: int
    gyro: tuple[float, float, float]    # rad/s
    accel: tuple[float, float, float]   # m/s^2
    buttons: int = 0         # bit 0 = multifunction button
    jaw: float = 0.0         # [0, 1]

    def __post_init__(self):
        if self.controller_id not in (0, 1):
            raise ValueError("controller_id must be 0 or 1")
        if not 0 <= self.seq < 1 << 16:
            raise ValueError("seq must fit 16 bits")
        if not 0 <= self.t_us < 1 << 64:
            raise ValueError("t_us must fit 64 bits")
        if not 0 <= self.buttons < 1 << 8:
            raise ValueError("buttons must fit 8 bits")
        if len(self.gyro) != 3 or len(self.accel) != 3:
            raise ValueError("gyro and accel must have 3 components")
        values = (*self.gyro, *self.accel, self.jaw)
        if not all(np.isfinite(v) for v in values):
            raise ValueError("gyro, accel, and jaw must be finite")
        object.__setattr__(self, "gyro", tuple(_f32(v) for v in self.gyro))
        object.__setattr__(self, "accel", tuple(_f32(v) for v in self.accel))
        object.__setattr__(self, "jaw", _f32(min(max(float(self.jaw), 0.0), 1.0)))

    @property
    def button_pressed(self) -> bool:
        return bool(self.buttons & BUTTON_MULTIFUNCTION)


def encode_packet(p: ControllerPacket) -> bytes:
    return _LAYOUT.pack(
        MAGIC, p.controller_id, p.seq, p.t_us,
        *p.gyro, *p.accel, p.buttons, p.jaw,
    )


def decode_packet(data: bytes) -> ControllerPacket:
    if len(data) != PACKET_SIZE:
        raise ValueError(f"packet must be exactly {PACKET_SIZE} bytes, got {len(data)}")
    fields = _LAYOUT.unpack(data)
    if fields[0] != MAGIC:
        raise ValueError(f"bad magic byte 0x{fields[0]:02X}")
    return ControllerPacket(
        controller_id=fields[1],
        seq=fields[2],
        t_us=fields[3],
        gyro=fields[4:7],
        accel=fields[7:10],
        buttons=fields[10],
        jaw=fields[11],
    )
