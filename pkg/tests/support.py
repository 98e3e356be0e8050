"""Shared builders for test clips and frames."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from alphacloak import Clip, ClipMeta, RgbaFrame, RgbFrame


def rgb_clip(arrays, rate=Fraction(30)) -> Clip:
    frames = tuple(RgbFrame(np.asarray(a, dtype=np.uint8)) for a in arrays)
    return Clip.from_frames(frames, rate)


def rgba_clip(arrays, rate=Fraction(30)) -> Clip:
    frames = tuple(RgbaFrame(np.asarray(a, dtype=np.uint8)) for a in arrays)
    return Clip.from_frames(frames, rate)


def random_rgb_clip(rng, width, height, count, rate=Fraction(30)) -> Clip:
    return rgb_clip(
        (rng.integers(0, 256, (height, width, 3), dtype=np.uint8) for _ in range(count)),
        rate,
    )


def random_rgba_frame(rng, width, height) -> RgbaFrame:
    return RgbaFrame(rng.integers(0, 256, (height, width, 4), dtype=np.uint8))


def dominated_pair(rng, width, height, count, rate=Fraction(30)) -> tuple[Clip, Clip]:
    """A random clip pair where the cover is pixelwise no brighter than
    the payload (per-pixel channel scaling keeps luma dominated too)."""
    fake_arrays = [rng.integers(0, 256, (height, width, 3), dtype=np.uint8) for _ in range(count)]
    true_arrays = []
    for fake in fake_arrays:
        scale = rng.random((height, width, 1))
        true_arrays.append(np.floor(fake.astype(np.float64) * scale).astype(np.uint8))
    return rgb_clip(true_arrays, rate), rgb_clip(fake_arrays, rate)


def constant_rgba_clip(width, height, count, rgba, rate=Fraction(30)) -> Clip:
    arr = np.zeros((height, width, 4), dtype=np.uint8)
    arr[:, :] = rgba
    return rgba_clip([arr.copy() for _ in range(count)], rate)
