"""Numbered-PNG frame sequence export/import with a JSON sidecar.

The escape hatch to containers this toolkit does not encode itself:
external tools can assemble the numbered PNGs into any alpha-capable
format, and the sidecar preserves the timing needed to do so.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..frames import Clip, ClipMeta, RgbaFrame, RgbFrame
from .png import read_png_rgba, write_png_rgba

SIDECAR_NAME = "sequence.json"
DEFAULT_PATTERN = "frame_%04d.png"


def _to_rgba(frame) -> RgbaFrame:
    if isinstance(frame, RgbaFrame):
        return frame
    if isinstance(frame, RgbFrame):
        out = np.empty((frame.height, frame.width, 4), dtype=np.uint8)
        out[:, :, :3] = frame.data
        out[:, :, 3] = 255
        return RgbaFrame(out)
    raise TypeError("frame sequences hold RGB or RGBA frames")


def export_frame_sequence(clip: Clip, directory, name_pattern: str = DEFAULT_PATTERN) -> None:
    try:
        name_pattern % 0
    except (TypeError, ValueError) as exc:
        raise ValueError(f"name pattern must take one integer: {name_pattern!r}") from exc
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    channels = 3 if (len(clip) and isinstance(clip.frames[0], RgbFrame)) else 4
    for i, frame in enumerate(clip):
        write_png_rgba(_to_rgba(frame), directory / (name_pattern % i))
    sidecar = {
        "width": clip.meta.width,
        "height": clip.meta.height,
        "frame_rate": [clip.meta.frame_rate.numerator, clip.meta.frame_rate.denominator],
        "frame_count": clip.meta.frame_count,
        "pattern": name_pattern,
        "channels": channels,
    }
    with open(directory / SIDECAR_NAME, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def import_frame_sequence(directory, frame_rate: Fraction | None = None) -> Clip:
    """Load an exported sequence; falls back to sorted ``*.png`` plus an
    explicit ``frame_rate`` when no sidecar is present."""
    directory = Path(directory)
    sidecar_path = directory / SIDECAR_NAME
    if sidecar_path.exists():
        with open(sidecar_path, encoding="utf-8") as fh:
            try:
                sidecar = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"unreadable sidecar {sidecar_path}: {exc}") from exc
        try:
            pattern = sidecar["pattern"]
            count = int(sidecar["frame_count"])
            size = (int(sidecar["width"]), int(sidecar["height"]))
            rate = Fraction(int(sidecar["frame_rate"][0]), int(sidecar["frame_rate"][1]))
            channels = int(sidecar.get("channels", 4))
        except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"invalid sidecar {sidecar_path}: {exc}") from exc
        paths = [directory / (pattern % i) for i in range(count)]
    else:
        if frame_rate is None:
            raise FormatError(
                f"{directory} has no {SIDECAR_NAME}; pass an explicit frame rate"
            )
        rate = Fraction(frame_rate)
        channels = 4
        size = None
        paths = sorted(p for p in directory.glob("*.png"))
        if not paths:
            raise FormatError(f"no PNG frames found in {directory}")

    frames = []
    for p in paths:
        rgba = read_png_rgba(p)
        frames.append(RgbFrame(rgba.data[:, :, :3]) if channels == 3 else rgba)
    if size is None:
        size = (frames[0].width, frames[0].height)
    meta = ClipMeta(width=size[0], height=size[1], frame_rate=rate, frame_count=len(frames))
    return Clip(frames=tuple(frames), meta=meta)
