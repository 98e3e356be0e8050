"""Rendering simulation for both consumption paths.

``composite`` models what a player shows a human (straight-alpha blend
over the player's background color); ``drop_alpha`` models a perception
pipeline that discards transparency before inference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ShapeError
from .frames import Clip, GrayFrame, RgbaFrame, RgbFrame, quantize
from .fusion import FusionParams


@dataclass(frozen=True)
class BackgroundColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not 0 <= v <= 255:
                raise ValueError(f"channel {name} out of range: {v}")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)


BLACK = BackgroundColor(0, 0, 0)
# Grey backgrounds are not published as exact values anywhere; mid-grey is
# this toolkit's default and can be overridden per preset file.
GREY = BackgroundColor(128, 128, 128)
WHITE = BackgroundColor(255, 255, 255)


@dataclass(frozen=True)
class PlayerPreset:
    """Background colors one player applies in its two display modes.

    A mode is ``None`` when the player's behavior in that mode is
    unrecorded.
    """

    name: str
    viewer_bg: BackgroundColor | None
    thumbnail_bg: BackgroundColor | None

    def background(self, mode: str) -> BackgroundColor:
        if mode == "viewer":
            bg = self.viewer_bg
        elif mode == "thumbnail":
            bg = self.thumbnail_bg
        else:
            raise ValueError(f"unknown display mode: {mode!r}")
        if bg is None:
            raise ValueError(f"preset {self.name!r} has no recorded {mode} background")
        return bg


def _preset(name, viewer, thumbnail):
    return PlayerPreset(name=name, viewer_bg=viewer, thumbnail_bg=thumbnail)


DEFAULT_PRESETS: dict[str, PlayerPreset] = {
    p.name: p
    for p in (
        _preset("vlc", BLACK, BLACK),
        _preset("quicktime", BLACK, None),
        _preset("macos-finder", None, BLACK),
        _preset("apple-tv", BLACK, BLACK),
        _preset("clipchamp", BLACK, None),
        _preset("premiere-pro", BLACK, BLACK),
        _preset("capcut", BLACK, BLACK),
        _preset("vimeo", BLACK, WHITE),
        _preset("youtube", GREY, GREY),
        _preset("google-drive", GREY, GREY),
        _preset("onedrive", GREY, GREY),
        _preset("amazon-drive", GREY, GREY),
        _preset("iphone-photos", WHITE, GREY),
    )
}


def _color_to_json(bg: BackgroundColor | None):
    return None if bg is None else [bg.r, bg.g, bg.b]


def _color_from_json(value) -> BackgroundColor | None:
    if value is None:
        return None
    r, g, b = value
    return BackgroundColor(int(r), int(g), int(b))


def save_presets(presets: Mapping[str, PlayerPreset], path) -> None:
    doc = {
        name: {"viewer": _color_to_json(p.viewer_bg), "thumbnail": _color_to_json(p.thumbnail_bg)}
        for name, p in sorted(presets.items())
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_presets(path) -> dict[str, PlayerPreset]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    presets = {}
    for name, entry in doc.items():
        presets[name] = PlayerPreset(
            name=name,
            viewer_bg=_color_from_json(entry.get("viewer")),
            thumbnail_bg=_color_from_json(entry.get("thumbnail")),
        )
    return presets


def composite(frame: RgbaFrame, bg: BackgroundColor) -> RgbFrame:
    """Blend a straight-alpha frame over a solid background.

    Blending happens in normalized floating point and is quantized once,
    per channel and per pixel.
    """
    alpha = frame.data[:, :, 3:4].astype(np.float64) / 255.0
    rgb = frame.data[:, :, :3].astype(np.float64) / 255.0
    bg_rgb = bg.as_array() / 255.0
    blended = alpha * rgb + (1.0 - alpha) * bg_rgb
    return RgbFrame(quantize(blended))


def drop_alpha(frame: RgbaFrame) -> RgbFrame:
    """Discard the alpha channel with no blending."""
    return RgbFrame(frame.data[:, :, :3])


def composite_clip(clip: Clip, bg: BackgroundColor) -> Clip:
    return Clip(frames=tuple(composite(f, bg) for f in clip), meta=clip.meta)


def drop_alpha_clip(clip: Clip) -> Clip:
    return Clip(frames=tuple(drop_alpha(f) for f in clip), meta=clip.meta)


@dataclass(frozen=True)
class VerificationReport:
    """Round-trip errors of a fused clip on both consumption paths.

    Errors are max absolute differences in 8-bit intensity levels; PSNR is
    reported in dB (infinite for a bit-exact path).
    """

    max_abs_error_human: int
    max_abs_error_machine: int
    psnr_human: float
    psnr_machine: float
    tolerance: int
    passed: bool


def _psnr(max_err_sq_sum: float, count: int) -> float:
    if count == 0:
        return math.inf
    mse = max_err_sq_sum / count
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / mse)


def verify_round_trip(
    fused: Clip,
    v_true_prepared: Sequence[GrayFrame],
    v_fake_prepared: Sequence[GrayFrame],
    params: FusionParams,
    tolerance: int = 2,
) -> VerificationReport:
    """Check that a fused clip reproduces both intended views.

    The human path composites over black and is compared against the
    dimmed cover; the machine path drops alpha and is compared against
    the remapped payload.
    """
    if not (len(fused) == len(v_true_prepared) == len(v_fake_prepared)):
        raise ShapeError(
            f"frame counts differ: fused {len(fused)}, cover {len(v_true_prepared)}, "
            f"payload {len(v_fake_prepared)}"
        )
    max_h = 0
    max_m = 0
    sq_h = 0.0
    sq_m = 0.0
    count = 0
    for frame, t, f in zip(fused, v_true_prepared, v_fake_prepared):
        if (t.width, t.height) != (frame.width, frame.height) or (f.width, f.height) != (
            frame.width,
            frame.height,
        ):
            raise ShapeError("reference frame dimensions differ from fused clip")
        human = composite(frame, BLACK).data.astype(np.int64)
        human_ref = quantize(t.data * params.true_scale).astype(np.int64)[:, :, None]
        diff_h = np.abs(human - human_ref)

        machine = drop_alpha(frame).data.astype(np.int64)
        machine_ref = quantize(f.data * params.fake_scale + params.fake_offset).astype(np.int64)[
            :, :, None
        ]
        diff_m = np.abs(machine - machine_ref)

        max_h = max(max_h, int(diff_h.max()))
        max_m = max(max_m, int(diff_m.max()))
        sq_h += float((diff_h.astype(np.float64) ** 2).sum())
        sq_m += float((diff_m.astype(np.float64) ** 2).sum())
        count += diff_h.size

    return VerificationReport(
        max_abs_error_human=max_h,
        max_abs_error_machine=max_m,
        psnr_human=_psnr(sq_h, count),
        psnr_machine=_psnr(sq_m, count),
        tolerance=tolerance,
        passed=(max_h <= tolerance and max_m <= tolerance),
    )
