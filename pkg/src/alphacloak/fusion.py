"""Per-frame fusion and whole-clip orchestration.

A fused frame carries the cover content in the alpha channel and the
payload content in the gray RGB channels: over a black background a
player reconstructs ``true_scale * cover``, while a pipeline that drops
alpha sees ``fake_scale * payload + fake_offset``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ShapeError
from .frames import Clip, ClipMeta, GrayFrame, RgbaFrame, RgbFrame, quantize, resize, to_grayscale


@dataclass(frozen=True)
class FusionParams:
    """Intensity mapping and target geometry for fusion.

    The constraints ``0 < true_scale <= fake_offset`` and
    ``fake_scale + fake_offset <= 1`` keep scaled cover values at or below
    scaled payload values everywhere, which keeps the per-pixel alpha
    ratio inside [0, 1].
    """

    target_width: int
    target_height: int
    true_scale: float = 0.4
    fake_scale: float = 0.6
    fake_offset: float = 0.4

    def __post_init__(self):
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError(
                f"target dimensions must be positive, got {self.target_width}x{self.target_height}"
            )
        if not 0.0 < self.true_scale <= self.fake_offset:
            raise ValueError(
                f"need 0 < true_scale <= fake_offset, got {self.true_scale} and {self.fake_offset}"
            )
        if self.fake_scale <= 0.0:
            raise ValueError(f"fake_scale must be positive, got {self.fake_scale}")
        if self.fake_scale + self.fake_offset > 1.0:
            raise ValueError(
                f"need fake_scale + fake_offset <= 1, got {self.fake_scale + self.fake_offset}"
            )


def fuse_frames(f_true: GrayFrame, f_fake: GrayFrame, params: FusionParams) -> RgbaFrame:
    """Fuse one prepared cover frame with one prepared payload frame.

    Per pixel: ``t = cover * true_scale``, ``k = payload * fake_scale +
    fake_offset``, alpha = t / k, RGB = k (gray). The divisor is bounded
    below by ``fake_offset`` so the ratio is always defined.
    """
    if (f_true.width, f_true.height) != (f_fake.width, f_fake.height):
        raise ShapeError(
            f"frame dimensions differ: {f_true.width}x{f_true.height} "
            f"vs {f_fake.width}x{f_fake.height}"
        )
    t = f_true.data * params.true_scale
    k = f_fake.data * params.fake_scale + params.fake_offset
    payload = quantize(k)
    alpha = quantize(t / k)
    rgba = np.dstack((payload, payload, payload, alpha))
    return RgbaFrame(rgba)


def prepare_frames(clip: Clip, width: int, height: int) -> tuple[GrayFrame, ...]:
    """Resize every frame to the target geometry and convert to gray."""
    prepared = []
    for frame in clip:
        if not isinstance(frame, RgbFrame):
            raise TypeError(f"expected RgbFrame clips, got {type(frame).__name__}")
        prepared.append(to_grayscale(resize(frame, width, height)))
    return tuple(prepared)


def generate_fused_clip(
    v_true: Clip,
    v_fake: Clip,
    params: FusionParams,
    *,
    frame_rate: Fraction | None = None,
) -> Clip:
    """Fuse two RGB clips into one RGBA attack clip.

    Both clips are prepared independently (resize, grayscale); fusion then
    runs index-aligned over the shorter of the two. Frames are independent
    of one another, so callers may parallelize per frame; output order is
    fixed by index. The output frame rate defaults to the cover clip's
    rate since that is the stream human viewers watch.
    """
    if len(v_true) == 0 or len(v_fake) == 0:
        raise ValueError("cannot fuse empty clips")
    prep_true = prepare_frames(v_true, params.target_width, params.target_height)
    prep_fake = prepare_frames(v_fake, params.target_width, params.target_height)
    n = min(len(prep_true), len(prep_fake))
    fused = tuple(fuse_frames(prep_true[i], prep_fake[i], params) for i in range(n))
    meta = ClipMeta(
        width=params.target_width,
        height=params.target_height,
        frame_rate=Fraction(frame_rate) if frame_rate is not None else v_true.meta.frame_rate,
        frame_count=n,
    )
    return Clip(frames=fused, meta=meta)
