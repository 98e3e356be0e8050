"""Detection interchange output (line-delimited, versioned header)."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

HEADER = "#aclk-detections v1"


@dataclass(frozen=True)
class Detection:
    frame_index: int
    label: str
    confidence: float
    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError("frame index must be non-negative")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")
        if self.left > self.right or self.top > self.bottom:
            raise ValueError("box edges are inverted")
        if "\t" in self.label or "\n" in self.label:
            raise ValueError("label must not contain tabs or newlines")


def write_detections_file(video_id: str, detections: Iterable[Detection], path) -> None:
    """Write all rows, atomically replacing ``path`` on success."""
    path = Path(path)
    rows = [HEADER]
    for d in detections:
        rows.append(
            "\t".join(
                (
                    video_id,
                    str(d.frame_index),
                    d.label,
                    repr(float(d.confidence)),
                    repr(float(d.left)),
                    repr(float(d.top)),
                    repr(float(d.right)),
                    repr(float(d.bottom)),
                )
            )
        )
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def filter_detections(detections: Sequence[Detection], threshold: float) -> list[Detection]:
    """Keep detections at or above the confidence threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold out of range: {threshold}")
    return [d for d in detections if d.confidence >= threshold]
