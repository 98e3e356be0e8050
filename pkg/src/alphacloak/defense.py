"""Alpha-channel countermeasures: transparency profiling and
composite-on-black input normalization.

Profiling flags frames whose transparent pixel fraction is implausible
for ordinary video; normalization renders frames the way a player would
(over black) before they ever reach a perception model, so both sides
see the same content.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .compositing import BLACK, composite
from .frames import Clip, RgbaFrame

DEFAULT_OPAQUE_THRESHOLD = 250  # tolerate codec rounding on opaque content
DEFAULT_FLAG_FRACTION = 0.01


@dataclass(frozen=True, eq=False)
class AlphaProfile:
    """Per-frame alpha statistics and the resulting verdict."""

    frame_index: int
    histogram: np.ndarray
    transparent_fraction: float
    entropy: float
    flagged: bool

    def __post_init__(self):
        hist = np.asarray(self.histogram, dtype=np.int64)
        if hist.shape != (256,):
            raise ValueError("histogram must have 256 bins")
        hist.setflags(write=False)
        object.__setattr__(self, "histogram", hist)


def profile_alpha(
    frame: RgbaFrame,
    opaque_threshold: int = DEFAULT_OPAQUE_THRESHOLD,
    flag_fraction: float = DEFAULT_FLAG_FRACTION,
    frame_index: int = 0,
) -> AlphaProfile:
    """Histogram a frame's alpha values and flag unnatural transparency.

    A pixel counts as transparent below ``opaque_threshold``; the frame is
    flagged when the transparent fraction strictly exceeds
    ``flag_fraction``.
    """
    if not 0 <= opaque_threshold <= 256:
        raise ValueError(f"opaque threshold out of range: {opaque_threshold}")
    if not 0.0 <= flag_fraction <= 1.0:
        raise ValueError(f"flag fraction out of range: {flag_fraction}")
    alpha = frame.alpha
    histogram = np.bincount(alpha.ravel(), minlength=256).astype(np.int64)
    pixels = alpha.size
    transparent = int(histogram[:opaque_threshold].sum())
    transparent_fraction = transparent / pixels
    p = histogram[histogram > 0] / pixels
    entropy = float(-(p * np.log2(p)).sum())
    return AlphaProfile(
        frame_index=frame_index,
        histogram=histogram,
        transparent_fraction=transparent_fraction,
        entropy=entropy,
        flagged=transparent_fraction > flag_fraction,
    )


def profile_clip(
    clip: Clip,
    opaque_threshold: int = DEFAULT_OPAQUE_THRESHOLD,
    flag_fraction: float = DEFAULT_FLAG_FRACTION,
) -> list[AlphaProfile]:
    return [
        profile_alpha(frame, opaque_threshold, flag_fraction, frame_index=i)
        for i, frame in enumerate(clip)
    ]


def normalize_on_black(clip: Clip) -> Clip:
    """Composite every frame over black, yielding the human-equivalent RGB view."""
    return Clip(frames=tuple(composite(f, BLACK) for f in clip), meta=clip.meta)


def profiles_to_text(profiles: Sequence[AlphaProfile]) -> str:
    """One tab-separated row per frame, ready for dashboards or diffing."""
    lines = ["#frame\ttransparent_fraction\tentropy_bits\tflagged"]
    for p in profiles:
        lines.append(
            f"{p.frame_index}\t{p.transparent_fraction:.6f}\t{p.entropy:.6f}\t{int(p.flagged)}"
        )
    return "\n".join(lines) + "\n"
