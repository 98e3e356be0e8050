"""Detector backends.

A backend is a callable taking one (H, W, 3) uint8 RGB array and
returning a list of Detection rows (frame_index filled in by the
runner, so backends emit it as 0).

Families:
  * ``fasterrcnn`` / ``retinanet`` via torchvision (ResNet-50 FPN),
    pretrained weights downloaded on demand or loaded from a local file;
  * ``yolov5n`` / ``yolov8n`` / ``yolov11n`` via the optional
    ``ultralytics`` package;
  * ``blob``: a dependency-light luminance blob detector for fixtures
    and offline pipeline tests — thresholded connected components over
    normalized luma, confidence = mean luma of the component.

Each family keeps its library's native preprocessing; no letterboxing or
normalization is added on top, so absolute scores are whatever the stock
pipeline produces.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .interchange import Detection

Backend = Callable[[np.ndarray], list[Detection]]

MODEL_NAMES = ("yolov5n", "yolov8n", "yolov11n", "fasterrcnn", "retinanet", "blob")

# Standard 91-slot COCO category table (torchvision detection label ids).
COCO_CATEGORIES = (
    "__background__", "person", "bicycle", "car", "motorcycle", "airplane", "bus",
    "train", "truck", "boat", "traffic light", "fire hydrant", "N/A", "stop sign",
    "parking meter", "bench", "bird", "cat", "dog", "horse", "sheep", "cow",
    "elephant", "bear", "zebra", "giraffe", "N/A", "backpack", "umbrella", "N/A",
    "N/A", "handbag", "tie", "suitcase", "frisbee", "skis", "snowboard",
    "sports ball", "kite", "baseball bat", "baseball glove", "skateboard",
    "surfboard", "tennis racket", "bottle", "N/A", "wine glass", "cup", "fork",
    "knife", "spoon", "bowl", "banana", "apple", "sandwich", "orange", "broccoli",
    "carrot", "hot dog", "pizza", "donut", "cake", "chair", "couch",
    "potted plant", "bed", "N/A", "dining table", "N/A", "N/A", "toilet", "N/A",
    "tv", "laptop", "mouse", "remote", "keyboard", "cell phone", "microwave",
    "oven", "toaster", "sink", "refrigerator", "N/A", "book", "clock", "vase",
    "scissors", "teddy bear", "hair drier", "toothbrush",
)

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class BackendUnavailableError(RuntimeError):
    """The requested model family cannot run in this environment."""


def blob_backend(
    bright_threshold: float = 0.7, min_area: int = 9
) -> Backend:
    """Detect bright regions on a darker background.

    Deterministic and weight-free; intended for conformance fixtures and
    directional end-to-end runs where a pretrained model is unavailable.
    """
    from scipy import ndimage

    def detect(frame: np.ndarray) -> list[Detection]:
        luma = (
            LUMA_WEIGHTS[0] * frame[:, :, 0].astype(np.float64)
            + LUMA_WEIGHTS[1] * frame[:, :, 1].astype(np.float64)
            + LUMA_WEIGHTS[2] * frame[:, :, 2].astype(np.float64)
        ) / 255.0
        mask = luma >= bright_threshold
        labeled, count = ndimage.label(mask)
        out = []
        for index, sl in enumerate(ndimage.find_objects(labeled), start=1):
            ys, xs = sl
            area = int((labeled[sl] == index).sum())
            if area < min_area:
                continue
            component = luma[sl][labeled[sl] == index]
            out.append(
                Detection(
                    frame_index=0,
                    label="object",
                    confidence=float(min(1.0, component.mean())),
                    left=float(xs.start),
                    top=float(ys.start),
                    right=float(xs.stop),
                    bottom=float(ys.stop),
                )
            )
        return out

    return detect


def torchvision_backend(
    model_name: str,
    device: str = "cpu",
    weights_path: str | None = None,
    random_init: bool = False,
    **model_kwargs,
) -> Backend:
    """Faster R-CNN or RetinaNet (ResNet-50 FPN) from torchvision.

    ``random_init`` skips weights entirely (smoke tests of the code path
    only; the outputs are meaningless).
    """
    try:
        import torch
        from torchvision.models import detection as tv_detection
    except ImportError as exc:
        raise BackendUnavailableError(
            f"{model_name} requires torch and torchvision: {exc}"
        ) from exc

    builders = {
        "fasterrcnn": tv_detection.fasterrcnn_resnet50_fpn,
        "retinanet": tv_detection.retinanet_resnet50_fpn,
    }
    builder = builders[model_name]
    try:
        if random_init:
            model = builder(weights=None, weights_backbone=None, **model_kwargs)
        elif weights_path is not None:
            model = builder(weights=None, weights_backbone=None, **model_kwargs)
            state = torch.load(weights_path, map_location=device, weights_only=True)
            model.load_state_dict(state)
        else:
            model = builder(weights="DEFAULT", **model_kwargs)
    except Exception as exc:
        raise BackendUnavailableError(
            f"could not obtain {model_name} weights "
            f"(pass --weights with a local file if downloads are blocked): {exc}"
        ) from exc
    model.eval()
    model.to(device)

    def detect(frame: np.ndarray) -> list[Detection]:
        tensor = torch.from_numpy(frame.astype(np.float32) / 255.0).permute(2, 0, 1)
        with torch.no_grad():
            (result,) = model([tensor.to(device)])
        out = []
        boxes = result["boxes"].cpu().numpy()
        scores = result["scores"].cpu().numpy()
        labels = result["labels"].cpu().numpy()
        for (left, top, right, bottom), score, label_id in zip(boxes, scores, labels):
            name = (
                COCO_CATEGORIES[label_id]
                if 0 <= label_id < len(COCO_CATEGORIES)
                else f"label{label_id}"
            )
            out.append(
                Detection(
                    frame_index=0,
                    label=name.replace(" ", "_"),
                    confidence=float(np.clip(score, 0.0, 1.0)),
                    left=float(left),
                    top=float(top),
                    right=float(max(right, left)),
                    bottom=float(max(bottom, top)),
                )
            )
        return out

    return detect


_YOLO_WEIGHT_FILES = {
    "yolov5n": "yolov5nu.pt",
    "yolov8n": "yolov8n.pt",
    "yolov11n": "yolo11n.pt",
}


def ultralytics_backend(
    model_name: str, device: str = "cpu", weights_path: str | None = None
) -> Backend:
    """YOLO nano variants through the ultralytics runtime."""
    try:
        from ultralytics import YOLO
    except ImportError as exc:
        raise BackendUnavailableError(
            f"{model_name} requires the 'ultralytics' package: {exc}"
        ) from exc
    try:
        model = YOLO(weights_path or _YOLO_WEIGHT_FILES[model_name])
    except Exception as exc:
        raise BackendUnavailableError(
            f"could not obtain {model_name} weights "
            f"(pass --weights with a local file if downloads are blocked): {exc}"
        ) from exc

    def detect(frame: np.ndarray) -> list[Detection]:
        (result,) = model.predict(frame[:, :, ::-1], device=device, verbose=False)
        out = []
        names = result.names
        for box in result.boxes:
            left, top, right, bottom = (float(v) for v in box.xyxy[0].tolist())
            class_id = int(box.cls[0])
            out.append(
                Detection(
                    frame_index=0,
                    label=str(names.get(class_id, f"label{class_id}")).replace(" ", "_"),
                    confidence=float(min(1.0, max(0.0, float(box.conf[0])))),
                    left=left,
                    top=top,
                    right=max(right, left),
                    bottom=max(bottom, top),
                )
            )
        return out

    return detect


def build_backend(
    model_name: str,
    device: str = "cpu",
    weights_path: str | None = None,
    **kwargs,
) -> Backend:
    if model_name not in MODEL_NAMES:
        raise ValueError(
            f"unknown model {model_name!r}; choose one of {', '.join(MODEL_NAMES)}"
        )
    if model_name == "blob":
        return blob_backend(**kwargs)
    if model_name in ("fasterrcnn", "retinanet"):
        return torchvision_backend(model_name, device, weights_path, **kwargs)
    return ultralytics_backend(model_name, device, weights_path)
