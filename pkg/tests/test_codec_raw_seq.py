import struct
from fractions import Fraction

import numpy as np
import pytest

from alphacloak import Clip, ClipMeta, FormatError
from alphacloak.codec import (
    export_frame_sequence,
    import_frame_sequence,
    read_raw_clip,
    write_raw_clip,
)
from alphacloak.codec.rawclip import _HEADER, RAW_MAGIC
from support import random_rgb_clip, random_rgba_frame


def _clips_equal(a: Clip, b: Clip) -> bool:
    return (
        a.meta == b.meta
        and len(a) == len(b)
        and all(np.array_equal(x.data, y.data) for x, y in zip(a, b))
    )


class TestRawClip:
    def test_rgba_round_trip(self, tmp_path):
        rng = np.random.default_rng(301)
        frames = tuple(random_rgba_frame(rng, 7, 5) for _ in range(4))
        clip = Clip.from_frames(frames, Fraction(24))
        path = tmp_path / "c.aclk"
        write_raw_clip(clip, path)
        assert _clips_equal(read_raw_clip(path), clip)

    def test_rgb_round_trip(self, tmp_path):
        rng = np.random.default_rng(303)
        clip = random_rgb_clip(rng, 9, 3, 2, rate=Fraction(30000, 1001))
        path = tmp_path / "rgb.aclk"
        write_raw_clip(clip, path)
        back = read_raw_clip(path)
        assert _clips_equal(back, clip)
        assert back.meta.frame_rate == Fraction(30000, 1001)

    def test_empty_clip_is_valid(self, tmp_path):
        meta = ClipMeta(width=3, height=2, frame_rate=Fraction(30), frame_count=0)
        clip = Clip(frames=(), meta=meta)
        path = tmp_path / "empty.aclk"
        write_raw_clip(clip, path)
        back = read_raw_clip(path)
        assert len(back) == 0
        assert back.meta == meta

    def test_bad_channel_count(self, tmp_path):
        header = _HEADER.pack(RAW_MAGIC, 1, 2, 2, 0, 30, 1, 5)
        path = tmp_path / "fivechan.aclk"
        path.write_bytes(header)
        with pytest.raises(FormatError, match="channel"):
            read_raw_clip(path)

    def test_bad_magic(self, tmp_path):
        header = _HEADER.pack(b"NOPE", 1, 2, 2, 0, 30, 1, 3)
        path = tmp_path / "magic.aclk"
        path.write_bytes(header)
        with pytest.raises(FormatError, match="magic"):
            read_raw_clip(path)

    def test_payload_length_mismatch(self, tmp_path):
        header = _HEADER.pack(RAW_MAGIC, 1, 2, 2, 1, 30, 1, 3)
        path = tmp_path / "short.aclk"
        path.write_bytes(header + b"\x00" * 5)  # needs 12
        with pytest.raises(FormatError, match="payload"):
            read_raw_clip(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "tiny.aclk"
        path.write_bytes(b"ACLK")
        with pytest.raises(FormatError, match="header"):
            read_raw_clip(path)

    def test_header_layout_is_little_endian(self, tmp_path):
        rng = np.random.default_rng(307)
        clip = Clip.from_frames((random_rgba_frame(rng, 2, 1),), Fraction(30))
        path = tmp_path / "layout.aclk"
        write_raw_clip(clip, path)
        raw = path.read_bytes()
        assert raw[:4] == b"ACLK"
        assert struct.unpack("<H", raw[4:6])[0] == 1
        assert struct.unpack("<I", raw[6:10])[0] == 2  # width
        assert struct.unpack("<I", raw[10:14])[0] == 1  # height


class TestFrameSequence:
    def test_export_names_and_sidecar(self, tmp_path):
        rng = np.random.default_rng(311)
        frames = tuple(random_rgba_frame(rng, 5, 4) for _ in range(3))
        clip = Clip.from_frames(frames, Fraction(30))
        out = tmp_path / "seq"
        export_frame_sequence(clip, out)
        assert sorted(p.name for p in out.iterdir()) == [
            "frame_0000.png",
            "frame_0001.png",
            "frame_0002.png",
            "sequence.json",
        ]

    def test_reimport_round_trip(self, tmp_path):
        rng = np.random.default_rng(313)
        frames = tuple(random_rgba_frame(rng, 6, 6) for _ in range(4))
        clip = Clip.from_frames(frames, Fraction(25))
        out = tmp_path / "seq"
        export_frame_sequence(clip, out)
        assert _clips_equal(import_frame_sequence(out), clip)

    def test_rgb_clip_round_trip(self, tmp_path):
        rng = np.random.default_rng(317)
        clip = random_rgb_clip(rng, 4, 7, 3)
        out = tmp_path / "rgbseq"
        export_frame_sequence(clip, out)
        assert _clips_equal(import_frame_sequence(out), clip)

    def test_custom_pattern(self, tmp_path):
        rng = np.random.default_rng(319)
        clip = Clip.from_frames((random_rgba_frame(rng, 3, 3),), Fraction(30))
        out = tmp_path / "pat"
        export_frame_sequence(clip, out, name_pattern="img_%02d.png")
        assert (out / "img_00.png").exists()
        assert _clips_equal(import_frame_sequence(out), clip)

    def test_bad_pattern_rejected(self, tmp_path):
        rng = np.random.default_rng(323)
        clip = Clip.from_frames((random_rgba_frame(rng, 3, 3),), Fraction(30))
        with pytest.raises(ValueError, match="pattern"):
            export_frame_sequence(clip, tmp_path / "x", name_pattern="no-number.png")

    def test_unwritable_destination(self, tmp_path):
        rng = np.random.default_rng(327)
        clip = Clip.from_frames((random_rgba_frame(rng, 3, 3),), Fraction(30))
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        with pytest.raises(OSError):
            export_frame_sequence(clip, blocker / "seq")

    def test_import_without_sidecar_needs_rate(self, tmp_path):
        rng = np.random.default_rng(331)
        clip = Clip.from_frames((random_rgba_frame(rng, 3, 3),), Fraction(30))
        out = tmp_path / "bare"
        export_frame_sequence(clip, out)
        (out / "sequence.json").unlink()
        with pytest.raises(FormatError, match="frame rate"):
            import_frame_sequence(out)
        back = import_frame_sequence(out, frame_rate=Fraction(12))
        assert back.meta.frame_rate == Fraction(12)
        assert np.array_equal(back.frames[0].data, clip.frames[0].data)
