"""Builders for synthetic street-style scenes and primary-CLI helpers."""

from __future__ import annotations

import struct
import subprocess
import sys
from pathlib import Path

import numpy as np

ACLK_HEADER = struct.Struct("<4sHIIIIIB")

KITTI_TAIL = "1.5 1.6 3.9 0.0 1.7 15.0 0.0"


def write_aclk(path: Path, frames: list[np.ndarray], rate=(30, 1)) -> None:
    """Minimal independent ACLK writer for fixtures."""
    h, w, channels = frames[0].shape
    header = ACLK_HEADER.pack(b"ACLK", 1, w, h, len(frames), rate[0], rate[1], channels)
    with open(path, "wb") as fh:
        fh.write(header)
        for frame in frames:
            fh.write(np.ascontiguousarray(frame, dtype=np.uint8).tobytes())


def run_primary(*args: str) -> subprocess.CompletedProcess:
    """Invoke the generator toolkit through its command-line interface."""
    return subprocess.run(
        [sys.executable, "-m", "alphacloak.cli", *args],
        capture_output=True,
        text=True,
    )


def street_scene(car_rows: list[tuple[int, int]], width=96, height=64, frames=8, step=2):
    """Bright rectangles drifting right over a dark road.

    ``car_rows`` holds (top, bottom) bands, one car per band; returns
    (frame arrays, kitti label lines).
    """
    arrays = []
    labels = []
    car_w = 18
    for t in range(frames):
        frame = np.full((height, width, 3), 30, dtype=np.uint8)
        for track, (top, bottom) in enumerate(car_rows):
            left = 4 + track * 30 + step * t
            right = left + car_w
            frame[top:bottom, left:right] = 230
            labels.append(
                f"{t} {track} Car 0 0 -1.57 {float(left)} {float(top)} "
                f"{float(right)} {float(bottom)} {KITTI_TAIL}"
            )
        arrays.append(frame)
    return arrays, labels


def parse_score_report(text: str) -> dict[str, dict]:
    """Parse the scorer's text report into {attacked_id: {top1, vls}}."""
    out: dict[str, dict] = {}
    current = None
    for line in text.splitlines():
        if line.startswith("#video\t"):
            _, attacked, _, top1 = line.split("\t")
            current = {"top1": top1, "vls": {}}
            out[attacked] = current
        elif current is not None and "\t" in line:
            cid, value = line.split("\t")
            if cid == "run" or not value:
                continue
            try:
                current["vls"][cid] = float(value)
            except ValueError:
                pass
    return out
