"""Alpha-preserving container I/O: PNG, animated PNG, raw clips, frame sequences."""

from .apng import ApngTimingInfo, read_apng, write_apng
from .frameseq import export_frame_sequence, import_frame_sequence
from .png import read_png_rgba, write_png_rgba
from .rawclip import RAW_MAGIC, read_raw_clip, write_raw_clip

__all__ = [
    "ApngTimingInfo",
    "RAW_MAGIC",
    "export_frame_sequence",
    "import_frame_sequence",
    "read_apng",
    "read_png_rgba",
    "read_raw_clip",
    "write_apng",
    "write_png_rgba",
    "write_raw_clip",
]
