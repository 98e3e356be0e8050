"""Directional end-to-end check against the generator toolkit.

Two synthetic street scenes are fused pairwise; the adapter runs over
each fused clip's machine view and the generator's scorer attributes the
detections. In both directions the payload source must win top-1 with a
strictly higher video similarity than the cover source.

The weight-free blob detector stands in for a pretrained model here:
this sandbox has no route to detector weights or benchmark data, so the
pretrained-model variant of this run lives in test_e2e_kitti_real.py and
activates when weights and data are supplied.
"""

import numpy as np
import pytest

from detector_adapter import AdapterConfig, run_detector
from support import parse_score_report, run_primary, street_scene, write_aclk

FRAMES = 8


@pytest.fixture(scope="module")
def arena(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("e2e")
    # scene A parks its cars in the top band, scene B in the bottom band,
    # so the two label sets never overlap spatially
    scene_a, labels_a = street_scene([(6, 16), (20, 30)], frames=FRAMES)
    scene_b, labels_b = street_scene([(38, 48), (52, 62)], frames=FRAMES)
    write_aclk(tmp / "scene_a.aclk", scene_a)
    write_aclk(tmp / "scene_b.aclk", scene_b)
    labels_dir = tmp / "labels"
    labels_dir.mkdir()
    (labels_dir / "scene_a.txt").write_text("\n".join(labels_a) + "\n")
    (labels_dir / "scene_b.txt").write_text("\n".join(labels_b) + "\n")

    for cover, payload, name in (
        ("scene_a", "scene_b", "attacked_ab"),
        ("scene_b", "scene_a", "attacked_ba"),
    ):
        result = run_primary(
            "fuse",
            str(tmp / f"{cover}.aclk"),
            str(tmp / f"{payload}.aclk"),
            "-o",
            str(tmp / f"{name}.aclk"),
        )
        assert result.returncode == 0, result.stderr
    return tmp, labels_dir


def _detect(tmp, name):
    out = tmp / f"{name}.dets.tsv"
    count = run_detector(
        AdapterConfig(
            model="blob",
            input_path=str(tmp / f"{name}.aclk"),
            output_path=str(out),
            confidence_threshold=0.25,
            video_id=name,
        )
    )
    assert count > 0
    return out


def _score(tmp, labels_dir, dets_path):
    report_path = dets_path.with_suffix(".report.txt")
    result = run_primary(
        "score",
        "--detections",
        str(dets_path),
        "--labels",
        str(labels_dir),
        "--frames",
        str(FRAMES),
        "--out",
        str(report_path),
    )
    assert result.returncode == 0, result.stderr
    return parse_score_report(report_path.read_text())


class TestDirectionalAttack:
    def test_payload_wins_in_both_directions(self, arena):
        tmp, labels_dir = arena
        for name, payload, cover in (
            ("attacked_ab", "scene_b", "scene_a"),
            ("attacked_ba", "scene_a", "scene_b"),
        ):
            dets = _detect(tmp, name)
            report = _score(tmp, labels_dir, dets)[name]
            assert report["top1"] == payload
            assert report["vls"][payload] > report["vls"][cover]

    def test_payload_alignment_is_strong(self, arena):
        # exact rectangles should give near-perfect overlap with the
        # payload labels and none with the cover labels
        tmp, labels_dir = arena
        dets = _detect(tmp, "attacked_ab")
        report = _score(tmp, labels_dir, dets)["attacked_ab"]
        assert report["vls"]["scene_b"] > 0.9
        assert report["vls"]["scene_a"] == 0.0
