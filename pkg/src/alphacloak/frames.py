"""Frame and clip value types plus the elementary pixel conversions.

All frame types are immutable value objects wrapping read-only numpy
arrays; every operation here is a pure function, so frames can be
processed in parallel without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ShapeError

# BT.601 luma weights. The grayscale convention is deliberately centralized
# here so a single constant pins the whole pipeline (and its tests).
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _frozen_array(data: np.ndarray, dtype, ndim: int, channels: int | None) -> np.ndarray:
    arr = np.asarray(data, dtype=dtype)
    if arr.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if channels is not None and arr.shape[2] != channels:
        raise ShapeError(f"expected {channels} channels, got {arr.shape[2]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"frame dimensions must be positive, got {arr.shape}")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayFrame:
    """Single-channel frame; float64 values in [0, 1], shape (height, width)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.data, np.float64, 2, None)
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("gray values must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class RgbFrame:
    """8-bit three-channel frame, shape (height, width, 3), dtype uint8."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, np.uint8, 3, 3))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class RgbaFrame:
    """8-bit four-channel frame with straight (non-premultiplied) alpha.

    Shape (height, width, 4), dtype uint8, channel order R, G, B, A with
    alpha last, matching the storage convention of every alpha-capable
    container this toolkit reads or writes.
    """

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, np.uint8, 3, 4))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def alpha(self) -> np.ndarray:
        return self.data[:, :, 3]


@dataclass(frozen=True)
class ClipMeta:
    """Video-level properties of a frame sequence."""

    width: int
    height: int
    frame_rate: Fraction
    frame_count: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"clip dimensions must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "frame_rate", Fraction(self.frame_rate))
        if self.frame_rate <= 0:
            raise ValueError(f"frame rate must be positive, got {self.frame_rate}")
        if self.frame_count < 0:
            raise ValueError("frame count must be non-negative")


@dataclass(frozen=True, eq=False)
class Clip:
    """An immutable frame sequence plus its metadata.

    Frames must all share one type (GrayFrame, RgbFrame or RgbaFrame) and
    the dimensions recorded in ``meta``.
    """

    frames: tuple
    meta: ClipMeta

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if len(frames) != self.meta.frame_count:
            raise ShapeError(
                f"metadata claims {self.meta.frame_count} frames, got {len(frames)}"
            )
        for i, frame in enumerate(frames):
            if not isinstance(frame, (GrayFrame, RgbFrame, RgbaFrame)):
                raise TypeError(f"frame {i} is not a frame object: {type(frame)!r}")
            if type(frame) is not type(frames[0]):
                raise TypeError("all frames in a clip must share one type")
            if frame.width != self.meta.width or frame.height != self.meta.height:
                raise ShapeError(
                    f"frame {i} is {frame.width}x{frame.height}, "
                    f"clip is {self.meta.width}x{self.meta.height}"
                )

    @classmethod
    def from_frames(cls, frames, frame_rate) -> "Clip":
        frames = tuple(frames)
        if not frames:
            raise ValueError("cannot build a clip from zero frames without metadata")
        meta = ClipMeta(
            width=frames[0].width,
            height=frames[0].height,
            frame_rate=Fraction(frame_rate),
            frame_count=len(frames),
        )
        return cls(frames=frames, meta=meta)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)


def quantize(x):
    """Map [0, 1] scalars to 8-bit levels, rounding halves away from zero.

    Accepts a scalar or an ndarray; the inverse is :func:`dequantize`.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("quantize input must lie in [0, 1]")
    out = np.floor(arr * 255.0 + 0.5).astype(np.uint8)
    if np.isscalar(x) or arr.ndim == 0:
        return int(out)
    return out


def dequantize(v):
    """Map 8-bit levels back to [0, 1] scalars."""
    return np.asarray(v, dtype=np.float64) / 255.0


def to_grayscale(frame: RgbFrame) -> GrayFrame:
    """Convert an RGB frame to a normalized luma frame (BT.601 weights)."""
    r, g, b = (frame.data[:, :, c].astype(np.float64) for c in range(3))
    luma = (LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b) / 255.0
    return GrayFrame(np.clip(luma, 0.0, 1.0))


def _sample_axis(src_len: int, dst_len: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Half-pixel-center mapping with edge clamping.
    pos = (np.arange(dst_len, dtype=np.float64) + 0.5) * (src_len / dst_len) - 0.5
    base = np.floor(pos)
    frac = pos - base
    lo = np.clip(base, 0, src_len - 1).astype(np.intp)
    hi = np.clip(base + 1, 0, src_len - 1).astype(np.intp)
    return lo, hi, frac


def resize(frame: RgbFrame, width: int, height: int, *, method: str = "bilinear") -> RgbFrame:
    """Resample a frame to ``width`` x ``height``.

    ``bilinear`` (the default) interpolates between pixel centers and
    clamps at the edges; ``nearest`` picks the covering source pixel and
    is exact-arithmetic friendly.
    """
    if width < 1 or height < 1:
        raise ValueError(f"target dimensions must be positive, got {width}x{height}")
    src = frame.data
    if method == "nearest":
        xs = np.minimum((np.floor((np.arange(width) + 0.5) * (frame.width / width))).astype(np.intp), frame.width - 1)
        ys = np.minimum((np.floor((np.arange(height) + 0.5) * (frame.height / height))).astype(np.intp), frame.height - 1)
        return RgbFrame(src[np.ix_(ys, xs)])
    if method != "bilinear":
        raise ValueError(f"unknown resize method: {method!r}")

    x_lo, x_hi, x_t = _sample_axis(frame.width, width)
    y_lo, y_hi, y_t = _sample_axis(frame.height, height)

    data = src.astype(np.float64)
    top = data[y_lo][:, x_lo] * (1.0 - x_t)[None, :, None] + data[y_lo][:, x_hi] * x_t[None, :, None]
    bot = data[y_hi][:, x_lo] * (1.0 - x_t)[None, :, None] + data[y_hi][:, x_hi] * x_t[None, :, None]
    out = top * (1.0 - y_t)[:, None, None] + bot * y_t[:, None, None]
    return RgbFrame(np.floor(out + 0.5).astype(np.uint8))
