"""Minimal but conformant PNG reader/writer for 8-bit frames.

The writer always emits truecolor-with-alpha (color type 6, bit depth 8)
with per-scanline adaptive filtering; the reader additionally accepts
truecolor, grayscale and grayscale-alpha files. Interlacing, palettes and
16-bit depths are rejected rather than mishandled. Alpha passes through
untouched in both directions (straight alpha, never premultiplied).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from ..errors import FormatError, UnsupportedFeatureError
from ..frames import RgbaFrame

SIGNATURE = b"\x89PNG\r\n\x1a\n"

_COLOR_TYPE_CHANNELS = {0: 1, 2: 3, 4: 2, 6: 4}


def build_chunk(chunk_type: bytes, data: bytes) -> bytes:
    return (
        struct.pack(">I", len(data))
        + chunk_type
        + data
        + struct.pack(">I", zlib.crc32(chunk_type + data) & 0xFFFFFFFF)
    )


def iter_chunks(buf: bytes):
    """Yield (type, data) pairs, validating structure and every CRC."""
    if len(buf) < len(SIGNATURE) or buf[: len(SIGNATURE)] != SIGNATURE:
        raise FormatError("bad PNG signature")
    pos = len(SIGNATURE)
    while True:
        if pos == len(buf):
            raise FormatError("missing IEND chunk")
        if pos + 8 > len(buf):
            raise FormatError("truncated chunk header")
        (length,) = struct.unpack(">I", buf[pos : pos + 4])
        ctype = buf[pos + 4 : pos + 8]
        end = pos + 8 + length + 4
        if end > len(buf):
            raise FormatError(f"truncated {ctype.decode('latin-1')} chunk")
        data = buf[pos + 8 : pos + 8 + length]
        (crc,) = struct.unpack(">I", buf[end - 4 : end])
        if zlib.crc32(ctype + data) & 0xFFFFFFFF != crc:
            raise FormatError(f"CRC mismatch in {ctype.decode('latin-1')} chunk")
        yield ctype, data
        pos = end
        if ctype == b"IEND":
            if pos != len(buf):
                raise FormatError("trailing data after IEND chunk")
            return


def parse_ihdr(data: bytes) -> tuple[int, int, int]:
    """Validate an IHDR payload; returns (width, height, channels)."""
    if len(data) != 13:
        raise FormatError("IHDR chunk must be 13 bytes")
    width, height, bit_depth, color_type, compression, filter_method, interlace = struct.unpack(
        ">IIBBBBB", data
    )
    if width < 1 or height < 1:
        raise FormatError(f"invalid image dimensions {width}x{height} in IHDR")
    if compression != 0 or filter_method != 0:
        raise FormatError("unknown compression or filter method in IHDR")
    if interlace == 1:
        raise UnsupportedFeatureError("interlaced PNG is not supported")
    if interlace != 0:
        raise FormatError(f"invalid interlace method {interlace} in IHDR")
    if color_type not in _COLOR_TYPE_CHANNELS:
        if color_type == 3:
            raise UnsupportedFeatureError("palette PNG is not supported")
        raise FormatError(f"invalid color type {color_type} in IHDR")
    if bit_depth != 8:
        raise UnsupportedFeatureError(f"bit depth {bit_depth} is not supported (8 only)")
    return width, height, _COLOR_TYPE_CHANNELS[color_type]


def _paeth(left: np.ndarray, up: np.ndarray, up_left: np.ndarray) -> np.ndarray:
    a = left.astype(np.int16)
    b = up.astype(np.int16)
    c = up_left.astype(np.int16)
    p = a + b - c
    pa = np.abs(p - a)
    pb = np.abs(p - b)
    pc = np.abs(p - c)
    return np.where((pa <= pb) & (pa <= pc), left, np.where(pb <= pc, up, up_left)).astype(
        np.uint8
    )


def filter_scanlines(pixels: np.ndarray, bpp: int) -> bytes:
    """Serialize rows with per-row adaptive filtering.

    Each row tries all five standard filters and keeps the one with the
    minimum sum of absolute (signed) residuals.
    """
    height, row_bytes = pixels.shape
    out = bytearray()
    prev = np.zeros(row_bytes, dtype=np.uint8)
    for y in range(height):
        row = pixels[y]
        left = np.zeros(row_bytes, dtype=np.uint8)
        left[bpp:] = row[:-bpp]
        up_left = np.zeros(row_bytes, dtype=np.uint8)
        up_left[bpp:] = prev[:-bpp]
        candidates = (
            row,
            row - left,
            row - prev,
            row - ((left.astype(np.uint16) + prev.astype(np.uint16)) // 2).astype(np.uint8),
            row - _paeth(left, prev, up_left),
        )
        best = 0
        best_cost = None
        for ftype, cand in enumerate(candidates):
            signed = cand.astype(np.int64)
            cost = int(np.minimum(signed, 256 - signed).sum())
            if best_cost is None or cost < best_cost:
                best, best_cost = ftype, cost
        out.append(best)
        out += candidates[best].tobytes()
        prev = row
    return bytes(out)


def unfilter_scanlines(data: bytes, width: int, height: int, bpp: int) -> bytearray:
    """Undo per-row filtering; returns raw pixel bytes."""
    row_bytes = width * bpp
    stride = row_bytes + 1
    if len(data) != stride * height:
        raise FormatError(
            f"decompressed image data is {len(data)} bytes, expected {stride * height}"
        )
    recon = bytearray(row_bytes * height)
    for y in range(height):
        ftype = data[y * stride]
        line = data[y * stride + 1 : (y + 1) * stride]
        start = y * row_bytes
        prev_start = start - row_bytes
        if ftype == 0:
            recon[start : start + row_bytes] = line
        elif ftype == 1:
            row = np.frombuffer(line, dtype=np.uint8).astype(np.int64)
            for lane in range(bpp):
                row[lane::bpp] = np.cumsum(row[lane::bpp])
            recon[start : start + row_bytes] = (row % 256).astype(np.uint8).tobytes()
        elif ftype == 2:
            if y == 0:
                recon[start : start + row_bytes] = line
            else:
                row = np.frombuffer(line, dtype=np.uint8)
                prev = np.frombuffer(bytes(recon[prev_start:start]), dtype=np.uint8)
                recon[start : start + row_bytes] = (row + prev).tobytes()
        elif ftype == 3:
            # Sequential left-neighbor dependency; plain byte loop.
            for i in range(row_bytes):
                a = recon[start + i - bpp] if i >= bpp else 0
                b = recon[prev_start + i] if y > 0 else 0
                recon[start + i] = (line[i] + (a + b) // 2) & 0xFF
        elif ftype == 4:
            for i in range(row_bytes):
                a = recon[start + i - bpp] if i >= bpp else 0
                b = recon[prev_start + i] if y > 0 else 0
                c = recon[prev_start + i - bpp] if (y > 0 and i >= bpp) else 0
                pa = abs(b - c)
                pb = abs(a - c)
                pc = abs(a + b - c - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                recon[start + i] = (line[i] + pred) & 0xFF
        else:
            raise FormatError(f"invalid scanline filter type {ftype} on row {y}")
    return recon


def compress_frame(frame: RgbaFrame, compress_level: int = 6) -> bytes:
    """Filter and deflate one RGBA frame into a PNG image-data stream."""
    pixels = frame.data.reshape(frame.height, frame.width * 4)
    return zlib.compress(filter_scanlines(pixels, 4), compress_level)


def encode_png_rgba(frame: RgbaFrame, compress_level: int = 6) -> bytes:
    ihdr = struct.pack(">IIBBBBB", frame.width, frame.height, 8, 6, 0, 0, 0)
    return (
        SIGNATURE
        + build_chunk(b"IHDR", ihdr)
        + build_chunk(b"IDAT", compress_frame(frame, compress_level))
        + build_chunk(b"IEND", b"")
    )


def write_png_rgba(frame: RgbaFrame, path, compress_level: int = 6) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png_rgba(frame, compress_level))


def expand_to_rgba(raw: bytes, width: int, height: int, channels: int) -> np.ndarray:
    """Widen decoded pixels to 4 channels (opaque where alpha is absent)."""
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
    if channels == 4:
        return arr
    out = np.empty((height, width, 4), dtype=np.uint8)
    if channels == 3:
        out[:, :, :3] = arr
        out[:, :, 3] = 255
    elif channels == 1:
        out[:, :, 0] = out[:, :, 1] = out[:, :, 2] = arr[:, :, 0]
        out[:, :, 3] = 255
    else:  # gray + alpha
        out[:, :, 0] = out[:, :, 1] = out[:, :, 2] = arr[:, :, 0]
        out[:, :, 3] = arr[:, :, 1]
    return out


def decode_image_data(idat: bytes, width: int, height: int, channels: int) -> np.ndarray:
    try:
        raw = zlib.decompress(idat)
    except zlib.error as exc:
        raise FormatError(f"bad deflate stream in image data: {exc}") from exc
    return expand_to_rgba(bytes(unfilter_scanlines(raw, width, height, channels)), width, height, channels)


def decode_png_rgba(buf: bytes) -> RgbaFrame:
    header = None
    idat = bytearray()
    seen_idat = False
    idat_done = False
    for ctype, data in iter_chunks(buf):
        if header is None:
            if ctype != b"IHDR":
                raise FormatError("first chunk is not IHDR")
            header = parse_ihdr(data)
        elif ctype == b"IHDR":
            raise FormatError("duplicate IHDR chunk")
        elif ctype == b"IDAT":
            if idat_done:
                raise FormatError("IDAT chunks are not consecutive")
            seen_idat = True
            idat += data
        else:
            if seen_idat:
                idat_done = True
            # Ancillary chunks (already CRC-checked) are ignored.
    if header is None:
        raise FormatError("missing IHDR chunk")
    if not seen_idat:
        raise FormatError("missing IDAT chunk")
    width, height, channels = header
    return RgbaFrame(decode_image_data(bytes(idat), width, height, channels))


def read_png_rgba(path) -> RgbaFrame:
    with open(path, "rb") as fh:
        return decode_png_rgba(fh.read())
