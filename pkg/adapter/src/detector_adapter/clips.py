"""Clip ingestion: the ACLK raw container and numbered-PNG sequences.

The ACLK layout is re-implemented here from its documented schema (all
little-endian: magic "ACLK", u16 version, u32 width/height/frames/
rate_num/rate_den, u8 channels, then packed frame bytes) so this tool
stays decoupled from the generator. Alpha is removed by plain projection
onto the RGB planes, never by blending, mirroring how RGB-only detectors
ingest RGBA input.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

ACLK_HEADER = struct.Struct("<4sHIIIIIB")
SIDECAR_NAME = "sequence.json"


class ClipFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LoadedClip:
    """Frames as (height, width, channels) uint8 arrays, channels 3 or 4."""

    frames: tuple[np.ndarray, ...]
    video_id: str


def drop_alpha(frame: np.ndarray) -> np.ndarray:
    """Project onto RGB; bit-exact, no compositing."""
    return frame[:, :, :3]


def read_aclk(path: Path) -> LoadedClip:
    buf = path.read_bytes()
    if len(buf) < ACLK_HEADER.size:
        raise ClipFormatError(f"{path}: shorter than an ACLK header")
    magic, version, width, height, count, _, rate_den, channels = ACLK_HEADER.unpack(
        buf[: ACLK_HEADER.size]
    )
    if magic != b"ACLK":
        raise ClipFormatError(f"{path}: bad magic {magic!r}")
    if version != 1:
        raise ClipFormatError(f"{path}: unsupported version {version}")
    if channels not in (3, 4):
        raise ClipFormatError(f"{path}: invalid channel count {channels}")
    if rate_den == 0:
        raise ClipFormatError(f"{path}: zero frame-rate denominator")
    frame_bytes = width * height * channels
    payload = buf[ACLK_HEADER.size :]
    if len(payload) != frame_bytes * count:
        raise ClipFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {frame_bytes * count}"
        )
    frames = tuple(
        np.frombuffer(payload, dtype=np.uint8, count=frame_bytes, offset=i * frame_bytes)
        .reshape(height, width, channels)
        .copy()
        for i in range(count)
    )
    return LoadedClip(frames=frames, video_id=path.stem)


def read_png_sequence(directory: Path) -> LoadedClip:
    sidecar = directory / SIDECAR_NAME
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        pattern = meta["pattern"]
        paths = [directory / (pattern % i) for i in range(int(meta["frame_count"]))]
    else:
        paths = sorted(directory.glob("*.png"))
    if not paths:
        raise ClipFormatError(f"{directory}: no PNG frames found")
    frames = []
    for p in paths:
        with Image.open(p) as im:
            frames.append(np.array(im.convert("RGBA")))
    return LoadedClip(frames=tuple(frames), video_id=directory.name)


def load_clip(path) -> LoadedClip:
    path = Path(path)
    if path.is_dir():
        return read_png_sequence(path)
    if path.suffix.lower() == ".aclk":
        return read_aclk(path)
    raise ClipFormatError(f"{path}: expected an .aclk file or a PNG-sequence directory")


def machine_view(clip: LoadedClip) -> list[np.ndarray]:
    """The per-frame RGB arrays a detector actually sees."""
    return [np.ascontiguousarray(drop_alpha(f)) for f in clip.frames]
