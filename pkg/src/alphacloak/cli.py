"""Command-line front end.

Subcommands wire the library into file-based workflows; containers are
picked by extension (.apng/.png, .aclk, or a directory of numbered PNGs)
unless forced with --format. Diagnostics go to stderr, report payloads to
stdout or --out, and exit codes follow one contract: 0 success, 2
input/format error, 3 invalid arguments, 4 verification or defense
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import codec
from .boxes import parse_kitti_tracking, read_detections
from .compositing import (
    DEFAULT_PRESETS,
    BackgroundColor,
    composite_clip,
    drop_alpha_clip,
    load_presets,
    verify_round_trip,
)
from .defense import normalize_on_black, profile_clip, profiles_to_text
from .errors import AlphaCloakError, FormatError, ShapeError
from .frames import Clip, RgbaFrame, RgbFrame
from .fusion import FusionParams, generate_fused_clip, prepare_frames
from .similarity import attribute, report_to_text, summarize_attacks, summary_to_table

PRESET_ENV_VAR = "ALPHACLOAK_PRESETS"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_USAGE = 3
EXIT_CHECK_FAILED = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the exit-code contract reserves
    # 2 for input/format errors and 3 for argument problems.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_rate(text: str) -> Fraction:
    rate = Fraction(text)
    if rate <= 0:
        raise ValueError(f"frame rate must be positive, got {text}")
    return rate


def _load_clip(path: str, frame_rate: Fraction | None = None) -> Clip:
    p = Path(path)
    if p.is_dir():
        return codec.import_frame_sequence(p, frame_rate=frame_rate)
    if not p.exists():
        raise FileNotFoundError(f"no such file: {p}")
    suffix = p.suffix.lower()
    if suffix == ".aclk":
        return codec.read_raw_clip(p)
    if suffix in (".apng", ".png"):
        clip, _ = codec.read_apng(p)
        return clip
    raise FormatError(f"cannot infer container of {p} (expected .apng/.png/.aclk or a directory)")


def _as_rgba_clip(clip: Clip) -> Clip:
    if len(clip) == 0 or isinstance(clip.frames[0], RgbaFrame):
        return clip
    frames = []
    for frame in clip:
        data = np.empty((frame.height, frame.width, 4), dtype=np.uint8)
        data[:, :, :3] = frame.data
        data[:, :, 3] = 255
        frames.append(RgbaFrame(data))
    return Clip(frames=tuple(frames), meta=clip.meta)


def _save_clip(clip: Clip, path: str, fmt: str | None = None) -> None:
    p = Path(path)
    if fmt is None:
        if p.is_dir() or str(path).endswith(os.sep) or p.suffix == "":
            fmt = "seq"
        elif p.suffix.lower() == ".aclk":
            fmt = "aclk"
        elif p.suffix.lower() in (".apng", ".png"):
            fmt = "apng"
        else:
            raise ValueError(f"cannot infer output container from {p}; pass --format")
    if fmt == "seq":
        codec.export_frame_sequence(clip, p)
    elif fmt == "aclk":
        codec.write_raw_clip(clip, p)
    elif fmt == "apng":
        codec.write_apng(_as_rgba_clip(clip), p)
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _write_report(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fusion_params(args, true_clip: Clip) -> FusionParams:
    return FusionParams(
        target_width=args.width if args.width else true_clip.meta.width,
        target_height=args.height if args.height else true_clip.meta.height,
        true_scale=args.true_scale,
        fake_scale=args.fake_scale,
        fake_offset=args.fake_offset,
    )


def _add_fusion_flags(parser) -> None:
    parser.add_argument("--width", type=int, default=0, help="target width (default: cover clip width)")
    parser.add_argument("--height", type=int, default=0, help="target height (default: cover clip height)")
    parser.add_argument("--true-scale", type=float, default=0.4)
    parser.add_argument("--fake-scale", type=float, default=0.6)
    parser.add_argument("--fake-offset", type=float, default=0.4)


def _add_io_flags(parser) -> None:
    parser.add_argument("--format", choices=("apng", "aclk", "seq"), help="force output container")
    parser.add_argument(
        "--frame-rate",
        type=_parse_rate,
        default=None,
        help="frame rate for inputs without timing metadata, e.g. 30 or 30000/1001",
    )


def _registry(args) -> dict:
    path = getattr(args, "registry", None) or os.environ.get(PRESET_ENV_VAR)
    if path:
        return load_presets(path)
    return dict(DEFAULT_PRESETS)


def _background(args) -> BackgroundColor:
    if args.color:
        parts = args.color.split(",")
        if len(parts) != 3:
            raise ValueError(f"--color expects R,G,B, got {args.color!r}")
        return BackgroundColor(*(int(v) for v in parts))
    presets = _registry(args)
    if args.preset not in presets:
        raise ValueError(
            f"unknown preset {args.preset!r}; valid names: {', '.join(sorted(presets))}"
        )
    return presets[args.preset].background(args.mode)


def cmd_fuse(args) -> int:
    v_true = _load_clip(args.true, args.frame_rate)
    v_fake = _load_clip(args.fake, args.frame_rate)
    params = _fusion_params(args, v_true)
    fused = generate_fused_clip(
        v_true, v_fake, params, frame_rate=args.output_rate
    )
    _save_clip(fused, args.out, args.format)
    _log(
        f"fused {len(fused)} frames at {fused.meta.width}x{fused.meta.height} "
        f"({fused.meta.frame_rate} fps); true_scale={params.true_scale} "
        f"fake_scale={params.fake_scale} fake_offset={params.fake_offset}"
    )
    return EXIT_OK


def cmd_render(args) -> int:
    fused = _load_clip(args.fused, args.frame_rate)
    bg = _background(args)
    rendered = composite_clip(fused, bg)
    _save_clip(rendered, args.out, args.format)
    _log(f"rendered {len(rendered)} frames over background ({bg.r},{bg.g},{bg.b})")
    return EXIT_OK


def cmd_extract_fake(args) -> int:
    fused = _load_clip(args.fused, args.frame_rate)
    extracted = drop_alpha_clip(fused)
    _save_clip(extracted, args.out, args.format)
    _log(f"extracted the alpha-drop view of {len(extracted)} frames")
    return EXIT_OK


def cmd_verify(args) -> int:
    fused = _load_clip(args.fused, args.frame_rate)
    v_true = _load_clip(args.true, args.frame_rate)
    v_fake = _load_clip(args.fake, args.frame_rate)
    params = FusionParams(
        target_width=fused.meta.width,
        target_height=fused.meta.height,
        true_scale=args.true_scale,
        fake_scale=args.fake_scale,
        fake_offset=args.fake_offset,
    )
    prep_true = prepare_frames(v_true, fused.meta.width, fused.meta.height)[: len(fused)]
    prep_fake = prepare_frames(v_fake, fused.meta.width, fused.meta.height)[: len(fused)]
    report = verify_round_trip(fused, prep_true, prep_fake, params, tolerance=args.tolerance)
    _log(
        f"human path: max error {report.max_abs_error_human} (PSNR {report.psnr_human:.2f} dB); "
        f"machine path: max error {report.max_abs_error_machine} "
        f"(PSNR {report.psnr_machine:.2f} dB); tolerance {report.tolerance}"
    )
    if not report.passed:
        _log("verification FAILED")
        return EXIT_CHECK_FAILED
    _log("verification passed")
    return EXIT_OK


def _load_candidates(paths: list[str]) -> dict:
    candidates = {}
    for entry in paths:
        p = Path(entry)
        files = sorted(p.glob("*.txt")) if p.is_dir() else [p]
        if not files:
            raise FileNotFoundError(f"no label files found in {p}")
        for f in files:
            labels = parse_kitti_tracking(f)
            candidates[labels.video_id] = labels
    return candidates


def cmd_score(args) -> int:
    detections = read_detections(args.detections)
    candidates = _load_candidates(args.labels)
    reports = [
        attribute(video_id, dets, candidates, args.frames)
        for video_id, dets in sorted(detections.items())
    ]
    chunks = [report_to_text(r) for r in reports]
    if args.pairs:
        fake_of = {}
        true_of = {}
        with open(args.pairs, encoding="utf-8") as fh:
            for line in fh:
                fields = line.split()
                if not fields:
                    continue
                if len(fields) != 3:
                    raise FormatError(f"pairs file expects: attacked_id fake_id true_id")
                fake_of[fields[0]] = fields[1]
                true_of[fields[0]] = fields[2]
        summary = summarize_attacks(reports, fake_of, true_of)
        chunks.append(summary_to_table({"all": summary}))
    _write_report("".join(chunks), args.out)
    return EXIT_OK


def cmd_profile(args) -> int:
    fused = _load_clip(args.fused, args.frame_rate)
    profiles = profile_clip(fused, args.opaque_threshold, args.flag_fraction)
    _write_report(profiles_to_text(profiles), args.out)
    flagged = sum(p.flagged for p in profiles)
    _log(f"{flagged}/{len(profiles)} frames flagged")
    return EXIT_CHECK_FAILED if flagged else EXIT_OK


def cmd_defend(args) -> int:
    fused = _load_clip(args.fused, args.frame_rate)
    normalized = normalize_on_black(fused)
    _save_clip(normalized, args.out, args.format)
    _log(f"normalized {len(normalized)} frames onto black")
    return EXIT_OK


def cmd_presets(args) -> int:
    presets = _registry(args)
    lines = ["#name\tviewer\tthumbnail"]
    for name in sorted(presets):
        p = presets[name]

        def _c(bg):
            return f"({bg.r},{bg.g},{bg.b})" if bg else "-"

        lines.append(f"{name}\t{_c(p.viewer_bg)}\t{_c(p.thumbnail_bg)}")
    _write_report("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="alphacloak", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse a cover clip and a payload clip into an RGBA clip")
    p.add_argument("true", help="cover clip (what humans should see)")
    p.add_argument("fake", help="payload clip (what alpha-dropping pipelines see)")
    p.add_argument("-o", "--out", required=True)
    p.add_argument(
        "--output-rate",
        type=_parse_rate,
        default=None,
        help="override the output frame rate (default: cover clip rate)",
    )
    _add_fusion_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("render", help="composite a fused clip over a player background")
    p.add_argument("fused")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--preset", default="vlc")
    p.add_argument("--mode", choices=("viewer", "thumbnail"), default="viewer")
    p.add_argument("--color", help="explicit background as R,G,B (overrides --preset)")
    p.add_argument("--registry", help=f"preset registry file (or ${PRESET_ENV_VAR})")
    _add_io_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("extract-fake", help="drop alpha, exposing the machine-path view")
    p.add_argument("fused")
    p.add_argument("-o", "--out", required=True)
    _add_io_flags(p)
    p.set_defaults(func=cmd_extract_fake)

    p = sub.add_parser("verify", help="check both consumption paths of a fused clip")
    p.add_argument("fused")
    p.add_argument("true")
    p.add_argument("fake")
    p.add_argument("--tolerance", type=int, default=2)
    _add_fusion_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("score", help="attribute detections to candidate source videos")
    p.add_argument("--detections", required=True, help="detection interchange file")
    p.add_argument(
        "--labels",
        required=True,
        nargs="+",
        help="KITTI tracking label files or directories of them",
    )
    p.add_argument("--frames", required=True, type=int, help="scored frame count per video")
    p.add_argument("--pairs", help="TSV of attacked_id fake_id true_id for a summary table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("profile", help="profile alpha histograms; nonzero exit if flagged")
    p.add_argument("fused")
    p.add_argument("--opaque-threshold", type=int, default=250)
    p.add_argument("--flag-fraction", type=float, default=0.01)
    p.add_argument("--out")
    _add_io_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("defend", help="composite onto black before downstream inference")
    p.add_argument("fused")
    p.add_argument("-o", "--out", required=True)
    _add_io_flags(p)
    p.set_defaults(func=cmd_defend)

    p = sub.add_parser("presets", help="list player background presets")
    p.add_argument("--registry", help=f"preset registry file (or ${PRESET_ENV_VAR})")
    p.add_argument("--out")
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except (FormatError, ShapeError, OSError) as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT
    except (ValueError, TypeError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except AlphaCloakError as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
