import struct
import zlib

import numpy as np
import pytest
from PIL import Image

from alphacloak import FormatError, RgbaFrame, UnsupportedFeatureError
from alphacloak.codec import read_png_rgba, write_png_rgba
from alphacloak.codec.png import (
    SIGNATURE,
    build_chunk,
    encode_png_rgba,
    unfilter_scanlines,
)
from support import random_rgba_frame


def rgba(*pixels):
    return RgbaFrame(np.array([list(pixels)], dtype=np.uint8))


class TestWriteReadRoundTrip:
    def test_single_pixel(self, tmp_path):
        frame = rgba((179, 179, 179, 73))
        path = tmp_path / "one.png"
        write_png_rgba(frame, path)
        assert np.array_equal(read_png_rgba(path).data, frame.data)

    def test_fully_transparent(self, tmp_path):
        frame = RgbaFrame(np.zeros((2, 2, 4), dtype=np.uint8))
        path = tmp_path / "clear.png"
        write_png_rgba(frame, path)
        back = read_png_rgba(path)
        assert np.all(back.data[:, :, 3] == 0)

    def test_random_frames_bit_exact(self, tmp_path):
        rng = np.random.default_rng(101)
        for i in range(15):
            w, h = int(rng.integers(1, 48)), int(rng.integers(1, 48))
            frame = random_rgba_frame(rng, w, h)
            path = tmp_path / f"r{i}.png"
            write_png_rgba(frame, path)
            assert np.array_equal(read_png_rgba(path).data, frame.data)

    def test_gradient_frames_bit_exact(self, tmp_path):
        # smooth content pushes the writer into the predictive filters
        ramp = np.arange(64, dtype=np.uint8)
        arr = np.empty((64, 64, 4), dtype=np.uint8)
        arr[:, :, 0] = ramp[None, :]
        arr[:, :, 1] = ramp[:, None]
        arr[:, :, 2] = (ramp[None, :] + ramp[:, None]) // 2
        arr[:, :, 3] = 255 - ramp[None, :]
        frame = RgbaFrame(arr)
        path = tmp_path / "ramp.png"
        write_png_rgba(frame, path)
        assert np.array_equal(read_png_rgba(path).data, frame.data)

    def test_compress_level_is_cosmetic(self, tmp_path):
        rng = np.random.default_rng(103)
        frame = random_rgba_frame(rng, 20, 20)
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        write_png_rgba(frame, a, compress_level=1)
        write_png_rgba(frame, b, compress_level=9)
        assert np.array_equal(read_png_rgba(a).data, read_png_rgba(b).data)


class TestReferenceDecoderAgrees:
    def test_pillow_decodes_emitted_files(self, tmp_path):
        rng = np.random.default_rng(107)
        for i in range(10):
            frame = random_rgba_frame(rng, int(rng.integers(1, 40)), int(rng.integers(1, 40)))
            path = tmp_path / f"p{i}.png"
            write_png_rgba(frame, path)
            with Image.open(path) as im:
                assert np.array_equal(np.array(im.convert("RGBA")), frame.data)


class TestForeignFiles:
    def test_rgb_png_gets_opaque_alpha(self, tmp_path):
        rng = np.random.default_rng(109)
        arr = rng.integers(0, 256, (9, 7, 3), dtype=np.uint8)
        path = tmp_path / "rgb.png"
        Image.fromarray(arr, mode="RGB").save(path)
        frame = read_png_rgba(path)
        assert np.array_equal(frame.data[:, :, :3], arr)
        assert np.all(frame.data[:, :, 3] == 255)

    def test_grayscale_png(self, tmp_path):
        rng = np.random.default_rng(113)
        arr = rng.integers(0, 256, (5, 6), dtype=np.uint8)
        path = tmp_path / "gray.png"
        Image.fromarray(arr, mode="L").save(path)
        frame = read_png_rgba(path)
        for c in range(3):
            assert np.array_equal(frame.data[:, :, c], arr)
        assert np.all(frame.data[:, :, 3] == 255)

    def test_grayscale_alpha_png(self, tmp_path):
        rng = np.random.default_rng(127)
        arr = rng.integers(0, 256, (5, 6, 2), dtype=np.uint8)
        path = tmp_path / "la.png"
        Image.fromarray(arr, mode="LA").save(path)
        frame = read_png_rgba(path)
        assert np.array_equal(frame.data[:, :, 0], arr[:, :, 0])
        assert np.array_equal(frame.data[:, :, 3], arr[:, :, 1])

    def test_pillow_rgba_files_decode_equal(self, tmp_path):
        rng = np.random.default_rng(131)
        arr = rng.integers(0, 256, (21, 13, 4), dtype=np.uint8)
        path = tmp_path / "pil.png"
        Image.fromarray(arr, mode="RGBA").save(path)
        assert np.array_equal(read_png_rgba(path).data, arr)


class TestErrorPaths:
    def test_truncated_file(self, tmp_path):
        frame = rgba((1, 2, 3, 4))
        data = encode_png_rgba(frame)
        path = tmp_path / "trunc.png"
        path.write_bytes(data[: len(data) - 7])
        with pytest.raises(FormatError):
            read_png_rgba(path)

    def test_bad_signature(self, tmp_path):
        path = tmp_path / "sig.png"
        path.write_bytes(b"NOTAPNG!" + b"\x00" * 32)
        with pytest.raises(FormatError, match="signature"):
            read_png_rgba(path)

    def test_crc_corruption_names_chunk(self, tmp_path):
        data = bytearray(encode_png_rgba(rgba((9, 9, 9, 9))))
        idat_at = data.index(b"IDAT")
        data[idat_at + 5] ^= 0xFF  # flip a payload byte, CRC now stale
        path = tmp_path / "crc.png"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="IDAT"):
            read_png_rgba(path)

    def test_trailing_garbage(self, tmp_path):
        path = tmp_path / "trail.png"
        path.write_bytes(encode_png_rgba(rgba((9, 9, 9, 9))) + b"junk")
        with pytest.raises(FormatError):
            read_png_rgba(path)

    def test_interlaced_rejected(self, tmp_path):
        ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 6, 0, 0, 1)
        raw = zlib.compress(b"\x00\x01\x02\x03\x04")
        path = tmp_path / "interlaced.png"
        path.write_bytes(
            SIGNATURE + build_chunk(b"IHDR", ihdr) + build_chunk(b"IDAT", raw) + build_chunk(b"IEND", b"")
        )
        with pytest.raises(UnsupportedFeatureError, match="interlace"):
            read_png_rgba(path)

    def test_sixteen_bit_rejected(self, tmp_path):
        arr = (np.arange(12, dtype=np.uint16) * 1000).reshape(3, 4)
        path = tmp_path / "deep.png"
        Image.fromarray(arr).convert("I;16").save(path)
        with pytest.raises(UnsupportedFeatureError, match="bit depth"):
            read_png_rgba(path)

    def test_palette_rejected(self, tmp_path):
        arr = np.arange(16, dtype=np.uint8).reshape(4, 4)
        path = tmp_path / "pal.png"
        Image.fromarray(arr, mode="P").save(path)
        with pytest.raises(UnsupportedFeatureError, match="palette"):
            read_png_rgba(path)

    def test_missing_idat(self, tmp_path):
        ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 6, 0, 0, 0)
        path = tmp_path / "noidat.png"
        path.write_bytes(SIGNATURE + build_chunk(b"IHDR", ihdr) + build_chunk(b"IEND", b""))
        with pytest.raises(FormatError, match="IDAT"):
            read_png_rgba(path)

    def test_bad_zlib_stream(self, tmp_path):
        ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 6, 0, 0, 0)
        path = tmp_path / "badz.png"
        path.write_bytes(
            SIGNATURE
            + build_chunk(b"IHDR", ihdr)
            + build_chunk(b"IDAT", b"this is not deflate")
            + build_chunk(b"IEND", b"")
        )
        with pytest.raises(FormatError, match="deflate"):
            read_png_rgba(path)


def _reference_unfilter(data, width, height, bpp):
    """Independent scalar implementation of the reconstruction filters."""
    row_bytes = width * bpp
    out = bytearray(row_bytes * height)
    stride = row_bytes + 1
    for y in range(height):
        ftype = data[y * stride]
        line = data[y * stride + 1 : (y + 1) * stride]
        for i in range(row_bytes):
            a = out[y * row_bytes + i - bpp] if i >= bpp else 0
            b = out[(y - 1) * row_bytes + i] if y > 0 else 0
            c = out[(y - 1) * row_bytes + i - bpp] if (y > 0 and i >= bpp) else 0
            if ftype == 0:
                pred = 0
            elif ftype == 1:
                pred = a
            elif ftype == 2:
                pred = b
            elif ftype == 3:
                pred = (a + b) // 2
            else:
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                pred = a if (pa <= pb and pa <= pc) else (b if pb <= pc else c)
            out[y * row_bytes + i] = (line[i] + pred) & 0xFF
    return bytes(out)


class TestUnfilterAgainstReference:
    @pytest.mark.parametrize("forced_filter", [0, 1, 2, 3, 4])
    def test_each_filter_type(self, forced_filter):
        rng = np.random.default_rng(400 + forced_filter)
        width, height, bpp = 6, 5, 4
        rows = []
        for _ in range(height):
            rows.append(bytes([forced_filter]) + rng.integers(0, 256, width * bpp, dtype=np.uint8).tobytes())
        data = b"".join(rows)
        mine = bytes(unfilter_scanlines(data, width, height, bpp))
        assert mine == _reference_unfilter(data, width, height, bpp)

    def test_mixed_filters(self):
        rng = np.random.default_rng(500)
        width, height, bpp = 9, 12, 4
        rows = []
        for y in range(height):
            rows.append(bytes([y % 5]) + rng.integers(0, 256, width * bpp, dtype=np.uint8).tobytes())
        data = b"".join(rows)
        assert bytes(unfilter_scanlines(data, width, height, bpp)) == _reference_unfilter(
            data, width, height, bpp
        )

    def test_invalid_filter_type(self):
        data = bytes([7]) + bytes(4)
        with pytest.raises(FormatError, match="filter type"):
            unfilter_scanlines(data, 1, 1, 4)
