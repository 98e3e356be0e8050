"""Command-line front end mirroring AdapterConfig."""

from __future__ import annotations

import argparse
import sys

from .clips import ClipFormatError
from .models import MODEL_NAMES, BackendUnavailableError
from .runner import AdapterConfig, run_detector


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detector-adapter",
        description="Run an object detector over a clip's alpha-dropped frames "
        "and write the detections interchange file.",
    )
    parser.add_argument("--model", required=True, choices=MODEL_NAMES)
    parser.add_argument("--input", required=True, help=".aclk clip or PNG-sequence directory")
    parser.add_argument("--output", required=True, help="detections file to write")
    parser.add_argument("--threshold", type=float, default=0.25)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--weights", help="local weights file (skips any download)")
    parser.add_argument("--video-id", help="id recorded in the output (default: input stem)")
    parser.add_argument(
        "--blob-threshold",
        type=float,
        default=0.7,
        help="luma cutoff for the blob backend",
    )
    parser.add_argument(
        "--blob-min-area", type=int, default=9, help="minimum component area in pixels"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    options = {}
    if args.model == "blob":
        options = {"bright_threshold": args.blob_threshold, "min_area": args.blob_min_area}
    try:
        config = AdapterConfig(
            model=args.model,
            input_path=args.input,
            output_path=args.output,
            confidence_threshold=args.threshold,
            device=args.device,
            weights_path=args.weights,
            video_id=args.video_id,
            backend_options=options,
        )
        count = run_detector(config)
    except (BackendUnavailableError, ClipFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {count} detections to {args.output}", file=sys.stderr)
    return 0


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
