"""Animated PNG reader/writer.

Written files keep every frame self-contained: full-canvas regions,
overwrite blending, no disposal. The reader handles the general case
(sub-canvas regions, all dispose and blend modes) and reconstructs one
full canvas per frame.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import FormatError
from ..frames import Clip, ClipMeta, RgbaFrame, quantize
from . import png

DISPOSE_NONE, DISPOSE_BACKGROUND, DISPOSE_PREVIOUS = 0, 1, 2
BLEND_SOURCE, BLEND_OVER = 0, 1

# Readers commonly clamp a zero delay to 10 ms; mirrored here when
# inferring a frame rate from such files.
_ZERO_DELAY = Fraction(1, 100)


@dataclass(frozen=True)
class ApngTimingInfo:
    """Animation timing as stored in the file."""

    num_frames: int
    num_plays: int
    delays: tuple[Fraction, ...]

    def __post_init__(self):
        if self.num_frames < 1:
            raise ValueError("an animation has at least one frame")
        if len(self.delays) != self.num_frames:
            raise ValueError("one delay per frame required")


def _delay_for_rate(frame_rate: Fraction) -> tuple[int, int]:
    delay = Fraction(frame_rate.denominator, frame_rate.numerator)
    delay = delay.limit_denominator(65535)
    if delay.numerator > 65535:
        raise ValueError(f"frame delay {delay} seconds does not fit the container")
    return delay.numerator, delay.denominator


def _fctl(seq: int, width: int, height: int, delay_num: int, delay_den: int) -> bytes:
    return struct.pack(
        ">IIIIIHHBB", seq, width, height, 0, 0, delay_num, delay_den, DISPOSE_NONE, BLEND_SOURCE
    )


def write_apng(clip: Clip, path, *, num_plays: int = 0, compress_level: int = 6) -> None:
    """Write an RGBA clip as an animated PNG.

    One fcTL per frame; the first frame rides in IDAT (so the file doubles
    as a plain PNG of that frame), the rest in fdAT chunks with dense
    sequence numbers.
    """
    if len(clip) == 0:
        raise ValueError("cannot write an empty clip")
    if not isinstance(clip.frames[0], RgbaFrame):
        raise TypeError("animated PNG output requires RGBA frames")
    meta = clip.meta
    delay_num, delay_den = _delay_for_rate(meta.frame_rate)

    out = bytearray(png.SIGNATURE)
    out += png.build_chunk(
        b"IHDR", struct.pack(">IIBBBBB", meta.width, meta.height, 8, 6, 0, 0, 0)
    )
    out += png.build_chunk(b"acTL", struct.pack(">II", len(clip), num_plays))
    seq = 0
    for i, frame in enumerate(clip):
        out += png.build_chunk(b"fcTL", _fctl(seq, meta.width, meta.height, delay_num, delay_den))
        seq += 1
        compressed = png.compress_frame(frame, compress_level)
        if i == 0:
            out += png.build_chunk(b"IDAT", compressed)
        else:
            out += png.build_chunk(b"fdAT", struct.pack(">I", seq) + compressed)
            seq += 1
    out += png.build_chunk(b"IEND", b"")
    with open(path, "wb") as fh:
        fh.write(bytes(out))


@dataclass
class _PendingFrame:
    width: int
    height: int
    x: int
    y: int
    delay: Fraction
    dispose: int
    blend: int
    from_idat: bool
    data: bytearray


def _parse_fctl(data: bytes, canvas_w: int, canvas_h: int) -> tuple[int, _PendingFrame]:
    if len(data) != 26:
        raise FormatError("fcTL chunk must be 26 bytes")
    seq, width, height, x, y, delay_num, delay_den, dispose, blend = struct.unpack(
        ">IIIIIHHBB", data
    )
    if width < 1 or height < 1 or x + width > canvas_w or y + height > canvas_h:
        raise FormatError("fcTL region falls outside the canvas")
    if dispose not in (DISPOSE_NONE, DISPOSE_BACKGROUND, DISPOSE_PREVIOUS):
        raise FormatError(f"invalid dispose_op {dispose} in fcTL")
    if blend not in (BLEND_SOURCE, BLEND_OVER):
        raise FormatError(f"invalid blend_op {blend} in fcTL")
    if delay_den == 0:
        delay_den = 100
    delay = Fraction(delay_num, delay_den) if delay_num else _ZERO_DELAY
    return seq, _PendingFrame(
        width=width,
        height=height,
        x=x,
        y=y,
        delay=delay,
        dispose=dispose,
        blend=blend,
        from_idat=False,
        data=bytearray(),
    )


def _blend_over(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    sa = src[:, :, 3:4].astype(np.float64) / 255.0
    da = dst[:, :, 3:4].astype(np.float64) / 255.0
    out_a = sa + da * (1.0 - sa)
    num = src[:, :, :3] * sa + dst[:, :, :3] * da * (1.0 - sa)
    rgb = np.divide(num, out_a * 255.0, out=np.zeros_like(num), where=out_a > 0)
    merged = np.concatenate((rgb, out_a), axis=2)
    return quantize(np.clip(merged, 0.0, 1.0))


def read_apng(path) -> tuple[Clip, ApngTimingInfo]:
    """Read an animated (or plain) PNG into a full-canvas RGBA clip.

    The clip's frame rate is inferred from the first frame delay; the
    returned timing info preserves every per-frame delay. A plain PNG
    yields a one-frame clip at 1 fps.
    """
    with open(path, "rb") as fh:
        buf = fh.read()

    header = None
    actl = None
    sequence_numbers: list[int] = []
    pending: list[_PendingFrame] = []
    default_idat = bytearray()
    idat_belongs_to_animation = False
    seen_idat = False

    for ctype, data in png.iter_chunks(buf):
        if header is None:
            if ctype != b"IHDR":
                raise FormatError("first chunk is not IHDR")
            header = png.parse_ihdr(data)
            continue
        if ctype == b"acTL":
            if seen_idat:
                raise FormatError("acTL chunk appears after IDAT")
            if actl is not None:
                raise FormatError("duplicate acTL chunk")
            if len(data) != 8:
                raise FormatError("acTL chunk must be 8 bytes")
            actl = struct.unpack(">II", data)
        elif ctype == b"fcTL":
            seq, frame = _parse_fctl(data, header[0], header[1])
            sequence_numbers.append(seq)
            pending.append(frame)
        elif ctype == b"IDAT":
            if pending and not seen_idat:
                # An fcTL ahead of IDAT makes the default image frame 0.
                first = pending[0]
                if len(pending) != 1:
                    raise FormatError("multiple fcTL chunks before IDAT")
                if (first.x, first.y, first.width, first.height) != (
                    0,
                    0,
                    header[0],
                    header[1],
                ):
                    raise FormatError("the IDAT frame must cover the full canvas")
                idat_belongs_to_animation = True
            seen_idat = True
            if idat_belongs_to_animation:
                pending[0].from_idat = True
                pending[0].data += data
            else:
                default_idat += data
        elif ctype == b"fdAT":
            if len(data) < 4:
                raise FormatError("fdAT chunk shorter than its sequence number")
            (seq,) = struct.unpack(">I", data[:4])
            sequence_numbers.append(seq)
            if not pending or pending[-1].from_idat:
                raise FormatError("fdAT chunk without a preceding fcTL")
            pending[-1].data += data[4:]
        # Other ancillary chunks are ignored.

    if header is None:
        raise FormatError("missing IHDR chunk")
    width, height, channels = header

    if actl is None:
        if pending or sequence_numbers:
            raise FormatError("animation chunks present but acTL is missing")
        frame = RgbaFrame(png.decode_image_data(bytes(default_idat), width, height, channels))
        meta = ClipMeta(width=width, height=height, frame_rate=Fraction(1), frame_count=1)
        timing = ApngTimingInfo(num_frames=1, num_plays=0, delays=(Fraction(1),))
        return Clip(frames=(frame,), meta=meta), timing

    if sequence_numbers != list(range(len(sequence_numbers))):
        raise FormatError("fcTL/fdAT sequence numbers must be dense and increasing from 0")
    num_frames, num_plays = actl
    if num_frames != len(pending):
        raise FormatError(
            f"acTL declares {num_frames} frames but {len(pending)} are present"
        )
    if not pending:
        raise FormatError("animation with zero frames")
    for frame in pending:
        if not frame.data:
            raise FormatError("animation frame with no image data")

    canvas = np.zeros((height, width, 4), dtype=np.uint8)
    outputs = []
    for index, item in enumerate(pending):
        # Frame regions use the same pixel layout as the main image.
        sub = png.decode_image_data(bytes(item.data), item.width, item.height, channels)
        ys, xs = slice(item.y, item.y + item.height), slice(item.x, item.x + item.width)
        dispose = item.dispose
        if index == 0 and dispose == DISPOSE_PREVIOUS:
            dispose = DISPOSE_BACKGROUND
        saved = canvas[ys, xs].copy() if dispose == DISPOSE_PREVIOUS else None
        if item.blend == BLEND_SOURCE:
            canvas[ys, xs] = sub
        else:
            canvas[ys, xs] = _blend_over(sub, canvas[ys, xs])
        outputs.append(RgbaFrame(canvas.copy()))
        if dispose == DISPOSE_BACKGROUND:
            canvas[ys, xs] = 0
        elif dispose == DISPOSE_PREVIOUS:
            canvas[ys, xs] = saved

    delays = tuple(item.delay for item in pending)
    frame_rate = Fraction(1) / delays[0]
    meta = ClipMeta(
        width=width, height=height, frame_rate=frame_rate, frame_count=len(outputs)
    )
    timing = ApngTimingInfo(num_frames=num_frames, num_plays=num_plays, delays=delays)
    return Clip(frames=tuple(outputs), meta=meta), timing
