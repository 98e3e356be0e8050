"""End-to-end detection run: clip in, interchange file out."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .clips import load_clip, machine_view
from .interchange import Detection, filter_detections, write_detections_file
from .models import build_backend


@dataclass
class AdapterConfig:
    model: str
    input_path: str
    output_path: str
    confidence_threshold: float = 0.25
    device: str = "cpu"
    weights_path: str | None = None
    video_id: str | None = None
    backend_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError(
                f"confidence threshold out of range: {self.confidence_threshold}"
            )


def run_detector(config: AdapterConfig) -> int:
    """Run the configured model over the clip's alpha-dropped frames.

    Returns the number of detections written. The output file is written
    atomically once every frame has been processed.
    """
    clip = load_clip(config.input_path)
    frames = machine_view(clip)
    backend = build_backend(
        config.model,
        device=config.device,
        weights_path=config.weights_path,
        **config.backend_options,
    )
    rows: list[Detection] = []
    for index, frame in enumerate(frames):
        detections = filter_detections(backend(frame), config.confidence_threshold)
        rows.extend(
            Detection(
                frame_index=index,
                label=d.label,
                confidence=d.confidence,
                left=d.left,
                top=d.top,
                right=d.right,
                bottom=d.bottom,
            )
            for d in detections
        )
    video_id = config.video_id or Path(config.input_path).stem
    write_detections_file(video_id, rows, config.output_path)
    return len(rows)
