"""alphacloak: build, simulate and defend against alpha-cloaked RGBA videos."""

from .boxes import (
    BoundingBox,
    FrameDetections,
    VideoLabels,
    filter_by_confidence,
    parse_kitti_tracking,
    read_detections,
    write_detections,
)
from .compositing import (
    BLACK,
    DEFAULT_PRESETS,
    GREY,
    WHITE,
    BackgroundColor,
    PlayerPreset,
    VerificationReport,
    composite,
    composite_clip,
    drop_alpha,
    drop_alpha_clip,
    load_presets,
    save_presets,
    verify_round_trip,
)
from .defense import AlphaProfile, normalize_on_black, profile_alpha, profile_clip
from .errors import (
    AlphaCloakError,
    FormatError,
    ParseError,
    ShapeError,
    UnsupportedFeatureError,
)
from .frames import (
    Clip,
    ClipMeta,
    GrayFrame,
    RgbaFrame,
    RgbFrame,
    dequantize,
    quantize,
    resize,
    to_grayscale,
)
from .fusion import FusionParams, fuse_frames, generate_fused_clip, prepare_frames
from .similarity import (
    AttackSummary,
    SimilarityReport,
    attribute,
    frame_level_similarity,
    iou,
    summarize_attacks,
    video_level_similarity,
)

__version__ = "0.1.0"
