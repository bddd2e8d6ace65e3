"""Bright-spot detection in 8-bit IR frames.

Pixels at or above a fixed threshold are grouped into 8-connected components;
each component becomes one blob with an intensity-weighted centroid. Intended
for scenes where the markers are by far the brightest objects, so a high
fixed threshold is enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

DEFAULT_THRESHOLD = 200
DEFAULT_MIN_AREA = 3

_EIGHT_CONN = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class IrFrame:
    t_us: int
    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ValueError("pixels must be a 2-D array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Blob:
    centroid_u: float
    centroid_v: float
    area: int
    peak: int


def detect_blobs(frame: IrFrame, threshold: int = DEFAULT_THRESHOLD,
                 min_area: int = DEFAULT_MIN_AREA) -> list[Blob]:
    """Blobs of pixels >= threshold, sorted by descending area.

    Centroids are weighted by pixel intensity, so a spot's sub-pixel position
    survives the binarization. Components smaller than min_area are dropped.
    """
    if not 0 < threshold < 255:
        raise ValueError(f"threshold must be in (0, 255), got {threshold}")
    mask = frame.pixels >= threshold
    labels, count = ndimage.label(mask, structure=_EIGHT_CONN)
    blobs = []
    for idx in range(1, count + 1):
        vs, us = np.nonzero(labels == idx)
        if len(us) < min_area:
            continue
        w = frame.pixels[vs, us].astype(float)
        total = w.sum()
        blobs.append(
            Blob(
                centroid_u=float((us * w).sum() / total),
                centroid_v=float((vs * w).sum() / total),
                area=int(len(us)),
                peak=int(frame.pixels[vs, us].max()),
            )
        )
    blobs.sort(key=lambda b: (-b.area, b.centroid_u, b.centroid_v))
    return blobs


def write_pgm(path, pixels: np.ndarray) -> None:
    """Write an 8-bit grayscale image as binary PGM (P5)."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (P5) into a (height, width) uint8 array."""
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    # header: magic, width, height, maxval, each separated by whitespace;
    # '#' comments allowed between tokens
    tokens: list[int] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = tokens
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pixels = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8)
    if pixels.size != w * h:
        raise ValueError(f"{path}: truncated pixel data")
    return pixels.reshape(h, w).copy()


def render_spot(pixels: np.ndarray, u: float, v: float, sigma_px: float = 1.2,
                amplitude: float = 255.0) -> None:
    """Additively draw a Gaussian spot at (u, v) into an intensity buffer."""
    h, w = pixels.shape
    r = int(np.ceil(4 * sigma_px))
    u0, v0 = int(round(u)), int(round(v))
    us = np.arange(max(0, u0 - r), min(w, u0 + r + 1))
    vs = np.arange(max(0, v0 - r), min(h, v0 + r + 1))
    if len(us) == 0 or len(vs) == 0:
        return
    uu, vv = np.meshgrid(us, vs)
    g = amplitude * np.exp(-((uu - u) ** 2 + (vv - v) ** 2) / (2 * sigma_px**2))
    region = pixels[vs[0] : vs[-1] + 1, us[0] : us[-1] + 1].astype(float)
    pixels[vs[0] : vs[-1] + 1, us[0] : us[-1] + 1] = np.clip(region + g, 0, 255).astype(
        pixels.dtype
    )
