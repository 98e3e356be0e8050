"""Raw uncompressed clip container ("ACLK").

A deterministic interchange format for tests and tool boundaries: a
little-endian fixed header followed by tightly packed frame bytes.

Header layout (27 bytes):
    magic    4s   b"ACLK"
    version  u16  currently 1
    width    u32
    height   u32
    frames   u32
    rate_num u32
    rate_den u32
    channels u8   3 (RGB) or 4 (RGBA)
"""

from __future__ import annotations

import struct
from fractions import Fraction

import numpy as np

from ..errors import FormatError
from ..frames import Clip, ClipMeta, RgbaFrame, RgbFrame

RAW_MAGIC = b"ACLK"
RAW_VERSION = 1
_HEADER = struct.Struct("<4sHIIIIIB")


def write_raw_clip(clip: Clip, path) -> None:
    if len(clip) and isinstance(clip.frames[0], RgbaFrame):
        channels = 4
    elif len(clip) == 0 or isinstance(clip.frames[0], RgbFrame):
        channels = 3
    else:
        raise TypeError("raw clips hold RGB or RGBA frames")
    meta = clip.meta
    header = _HEADER.pack(
        RAW_MAGIC,
        RAW_VERSION,
        meta.width,
        meta.height,
        meta.frame_count,
        meta.frame_rate.numerator,
        meta.frame_rate.denominator,
        channels,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for frame in clip:
            fh.write(frame.data.tobytes())


def read_raw_clip(path) -> Clip:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < _HEADER.size:
        raise FormatError("file shorter than the raw clip header")
    magic, version, width, height, frame_count, rate_num, rate_den, channels = _HEADER.unpack(
        buf[: _HEADER.size]
    )
    if magic != RAW_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {RAW_MAGIC!r}")
    if version != RAW_VERSION:
        raise FormatError(f"unsupported raw clip version {version}")
    if channels not in (3, 4):
        raise FormatError(f"invalid channel count {channels}")
    if rate_den == 0 or rate_num == 0:
        raise FormatError("frame rate must be a positive rational")
    if width < 1 or height < 1:
        raise FormatError(f"invalid dimensions {width}x{height}")
    payload = buf[_HEADER.size :]
    frame_bytes = width * height * channels
    if len(payload) != frame_bytes * frame_count:
        raise FormatError(
            f"payload is {len(payload)} bytes, expected {frame_bytes * frame_count}"
        )
    frame_cls = RgbaFrame if channels == 4 else RgbFrame
    frames = []
    for i in range(frame_count):
        arr = np.frombuffer(payload, dtype=np.uint8, count=frame_bytes, offset=i * frame_bytes)
        frames.append(frame_cls(arr.reshape(height, width, channels)))
    meta = ClipMeta(
        width=width,
        height=height,
        frame_rate=Fraction(rate_num, rate_den),
        frame_count=frame_count,
    )
    return Clip(frames=tuple(frames), meta=meta)
