"""IoU-based similarity scoring and source attribution.

A frame score is the mean, over predictions, of each prediction's best
IoU against the ground-truth boxes; a video score is the mean frame
score over an index-aligned frame range; attribution picks the candidate
with the highest video score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .boxes import BoundingBox, FrameDetections, VideoLabels


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; degenerate unions score 0."""
    inter_w = min(a.right, b.right) - max(a.left, b.left)
    inter_h = min(a.bottom, b.bottom) - max(a.top, b.top)
    inter = max(0.0, inter_w) * max(0.0, inter_h)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def frame_level_similarity(
    preds: Sequence[BoundingBox], gts: Sequence[BoundingBox]
) -> float:
    """Mean best-match IoU per prediction.

    Matching is purely spatial (class labels are ignored); an empty
    prediction or ground-truth set contributes 0, which deliberately
    penalizes frames where nothing aligns rather than skipping them.
    """
    if not preds:
        return 0.0
    total = 0.0
    for p in preds:
        best = 0.0
        for g in gts:
            score = iou(p, g)
            if score > best:
                best = score
        total += best
    return total / len(preds)


def _detections_by_frame(dets: Sequence[FrameDetections]) -> dict[int, tuple[BoundingBox, ...]]:
    by_frame: dict[int, tuple[BoundingBox, ...]] = {}
    for fd in dets:
        if fd.frame_index in by_frame:
            raise ValueError(f"duplicate detections for frame {fd.frame_index}")
        by_frame[fd.frame_index] = fd.boxes
    return by_frame


def video_level_similarity(
    attacked_dets: Sequence[FrameDetections], candidate: VideoLabels, frame_count: int
) -> float:
    """Mean frame score over frames 0..frame_count-1, aligned by index."""
    if frame_count < 1:
        raise ValueError(f"frame count must be at least 1, got {frame_count}")
    by_frame = _detections_by_frame(attacked_dets)
    total = 0.0
    for t in range(frame_count):
        total += frame_level_similarity(by_frame.get(t, ()), candidate.boxes_at(t))
    return total / frame_count


@dataclass(frozen=True)
class SimilarityReport:
    """Per-candidate video scores for one attacked video.

    ``top1`` is the argmax candidate; exact ties resolve to the
    lexicographically smallest id so reports are deterministic.
    """

    attacked_video_id: str
    per_candidate: dict[str, float]
    top1: str
    per_frame: dict[int, dict[str, float]] | None = None


def attribute(
    attacked_video_id: str,
    attacked_dets: Sequence[FrameDetections],
    candidates: Mapping[str, VideoLabels],
    frame_count: int,
    *,
    include_per_frame: bool = False,
) -> SimilarityReport:
    """Score an attacked video against every candidate source."""
    if not candidates:
        raise ValueError("at least one candidate is required")
    if frame_count < 1:
        raise ValueError(f"frame count must be at least 1, got {frame_count}")
    by_frame = _detections_by_frame(attacked_dets)

    per_candidate: dict[str, float] = {}
    per_frame: dict[int, dict[str, float]] = {t: {} for t in range(frame_count)}
    for cid in sorted(candidates):
        labels = candidates[cid]
        total = 0.0
        for t in range(frame_count):
            fls = frame_level_similarity(by_frame.get(t, ()), labels.boxes_at(t))
            per_frame[t][cid] = fls
            total += fls
        per_candidate[cid] = total / frame_count

    best = max(per_candidate.values())
    top1 = min(cid for cid, v in per_candidate.items() if v == best)
    return SimilarityReport(
        attacked_video_id=attacked_video_id,
        per_candidate=per_candidate,
        top1=top1,
        per_frame=per_frame if include_per_frame else None,
    )


@dataclass(frozen=True)
class AttackSummary:
    """Aggregate scores over a batch of attacked videos with designated
    payload/cover sources, in percent."""

    avg_vls_fake: float
    avg_vls_true: float
    fake_top1_pct: float
    true_top1_pct: float
    count: int


def summarize_attacks(
    reports: Sequence[SimilarityReport],
    fake_of: Mapping[str, str],
    true_of: Mapping[str, str],
) -> AttackSummary:
    """Collapse per-video reports into the four headline numbers."""
    if not reports:
        raise ValueError("no reports to summarize")
    vls_fake = []
    vls_true = []
    fake_top1 = 0
    true_top1 = 0
    for report in reports:
        fake_id = fake_of[report.attacked_video_id]
        true_id = true_of[report.attacked_video_id]
        vls_fake.append(report.per_candidate[fake_id])
        vls_true.append(report.per_candidate[true_id])
        if report.top1 == fake_id:
            fake_top1 += 1
        elif report.top1 == true_id:
            true_top1 += 1
    n = len(reports)
    return AttackSummary(
        avg_vls_fake=100.0 * sum(vls_fake) / n,
        avg_vls_true=100.0 * sum(vls_true) / n,
        fake_top1_pct=100.0 * fake_top1 / n,
        true_top1_pct=100.0 * true_top1 / n,
        count=n,
    )


def report_to_text(report: SimilarityReport) -> str:
    """Serialize one report as tab-separated rows (best candidate first)."""
    lines = [f"#video\t{report.attacked_video_id}\ttop1\t{report.top1}"]
    ranked = sorted(report.per_candidate.items(), key=lambda kv: (-kv[1], kv[0]))
    for cid, vls in ranked:
        lines.append(f"{cid}\t{vls:.6f}")
    return "\n".join(lines) + "\n"


def summary_to_table(rows: Mapping[str, AttackSummary]) -> str:
    """Render attack summaries as an aligned text table."""
    header = ("run", "avg VLS fake (%)", "avg VLS true (%)", "fake top-1 (%)", "true top-1 (%)")
    body = [
        (
            name,
            f"{s.avg_vls_fake:.3f}",
            f"{s.avg_vls_true:.3f}",
            f"{s.fake_top1_pct:.1f}",
            f"{s.true_top1_pct:.1f}",
        )
        for name, s in rows.items()
    ]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*row) for row in [header, *body]) + "\n"
