"""detector_adapter: run pretrained detectors over RGBA clips and export boxes."""

from .clips import ClipFormatError, LoadedClip, drop_alpha, load_clip, machine_view
from .interchange import Detection, filter_detections, write_detections_file
from .models import MODEL_NAMES, BackendUnavailableError, build_backend
from .runner import AdapterConfig, run_detector

__version__ = "0.1.0"
