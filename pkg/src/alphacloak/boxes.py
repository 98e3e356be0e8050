"""Bounding-box geometry, KITTI tracking label parsing, and the
detection interchange format.

The interchange format is line-delimited text with a version header, so
any detector runner can stream records into it:

    #aclk-detections v1
    <video_id> TAB <frame> TAB <label> TAB <confidence> TAB <left> TAB <top> TAB <right> TAB <bottom>
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, ParseError

INTERCHANGE_HEADER = "#aclk-detections v1"

# KITTI tracking label columns: frame, track id, type, truncated, occluded,
# observation angle, bbox left/top/right/bottom, 3-D dimensions (3),
# 3-D location (3), rotation; detector dumps append a score column.
_KITTI_COLUMNS = (17, 18)
_KITTI_SKIP_TYPES = {"DontCare"}


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in continuous pixel coordinates."""

    left: float
    top: float
    right: float
    bottom: float
    class_label: str = ""
    confidence: float = 1.0

    def __post_init__(self):
        for name, v in (
            ("left", self.left),
            ("top", self.top),
            ("right", self.right),
            ("bottom", self.bottom),
        ):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.left > self.right:
            raise ValueError(f"left {self.left} exceeds right {self.right}")
        if self.top > self.bottom:
            raise ValueError(f"top {self.top} exceeds bottom {self.bottom}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")

    @property
    def area(self) -> float:
        return (self.right - self.left) * (self.bottom - self.top)


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    boxes: tuple[BoundingBox, ...]

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError(f"frame index must be non-negative, got {self.frame_index}")
        object.__setattr__(self, "boxes", tuple(self.boxes))


@dataclass(frozen=True)
class VideoLabels:
    """Ground-truth boxes for one video, keyed by frame index."""

    video_id: str
    frames: dict[int, tuple[BoundingBox, ...]]

    def __post_init__(self):
        frames = {int(k): tuple(v) for k, v in self.frames.items()}
        if any(k < 0 for k in frames):
            raise ValueError("frame indices must be non-negative")
        object.__setattr__(self, "frames", frames)

    def boxes_at(self, frame_index: int) -> tuple[BoundingBox, ...]:
        return self.frames.get(frame_index, ())


def parse_kitti_tracking(path, video_id: str | None = None) -> VideoLabels:
    """Parse one KITTI tracking label file into per-frame ground truth.

    Every non-DontCare line yields one box (confidence 1.0); DontCare
    regions are skipped. Unexpected column counts or non-numeric fields
    fail loudly with the line number.
    """
    path = Path(path)
    frames: dict[int, list[BoundingBox]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) not in _KITTI_COLUMNS:
                raise FormatError(
                    f"{path.name} line {lineno}: expected 17 or 18 columns, got {len(fields)}"
                )
            label = fields[2]
            if label in _KITTI_SKIP_TYPES:
                continue
            try:
                frame_index = int(fields[0])
                left, top, right, bottom = (float(v) for v in fields[6:10])
            except ValueError as exc:
                raise ParseError(f"{path.name}: {exc}", line_number=lineno) from exc
            if frame_index < 0:
                raise ParseError(f"{path.name}: negative frame index", line_number=lineno)
            box = BoundingBox(
                left=left, top=top, right=right, bottom=bottom, class_label=label, confidence=1.0
            )
            frames.setdefault(frame_index, []).append(box)
    return VideoLabels(
        video_id=video_id if video_id is not None else path.stem,
        frames={k: tuple(v) for k, v in frames.items()},
    )


def filter_by_confidence(dets: FrameDetections, threshold: float) -> FrameDetections:
    """Keep boxes with confidence >= threshold (inclusive), order preserved."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold out of range: {threshold}")
    return FrameDetections(
        frame_index=dets.frame_index,
        boxes=tuple(b for b in dets.boxes if b.confidence >= threshold),
    )


def write_detections(dets: Mapping[str, Sequence[FrameDetections]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(INTERCHANGE_HEADER + "\n")
        for video_id in dets:
            for frame in dets[video_id]:
                for box in frame.boxes:
                    fh.write(
                        "\t".join(
                            (
                                video_id,
                                str(frame.frame_index),
                                box.class_label,
                                repr(box.confidence),
                                repr(box.left),
                                repr(box.top),
                                repr(box.right),
                                repr(box.bottom),
                            )
                        )
                        + "\n"
                    )


def _group_by_frame(rows: Iterable[tuple[int, BoundingBox]]) -> list[FrameDetections]:
    by_frame: dict[int, list[BoundingBox]] = {}
    for frame_index, box in rows:
        by_frame.setdefault(frame_index, []).append(box)
    return [
        FrameDetections(frame_index=i, boxes=tuple(by_frame[i])) for i in sorted(by_frame)
    ]


def read_detections(path) -> dict[str, list[FrameDetections]]:
    """Read an interchange file; frames come back in ascending order."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != INTERCHANGE_HEADER:
            raise FormatError(
                f"{path.name}: unrecognized header {header!r}, expected {INTERCHANGE_HEADER!r}"
            )
        rows: dict[str, list[tuple[int, BoundingBox]]] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 8:
                raise FormatError(f"{path.name} line {lineno}: expected 8 fields, got {len(fields)}")
            video_id, frame_s, label, conf_s, left_s, top_s, right_s, bottom_s = fields
            try:
                frame_index = int(frame_s)
            except ValueError as exc:
                raise FormatError(f"{path.name} line {lineno}: bad frame field: {frame_s!r}") from exc
            if frame_index < 0:
                raise FormatError(f"{path.name} line {lineno}: bad frame field: negative")
            try:
                confidence = float(conf_s)
                coords = tuple(float(v) for v in (left_s, top_s, right_s, bottom_s))
            except ValueError as exc:
                raise FormatError(f"{path.name} line {lineno}: bad numeric field: {exc}") from exc
            try:
                box = BoundingBox(
                    left=coords[0],
                    top=coords[1],
                    right=coords[2],
                    bottom=coords[3],
                    class_label=label,
                    confidence=confidence,
                )
            except ValueError as exc:
                raise FormatError(f"{path.name} line {lineno}: {exc}") from exc
            rows.setdefault(video_id, []).append((frame_index, box))
    return {video_id: _group_by_frame(pairs) for video_id, pairs in rows.items()}
