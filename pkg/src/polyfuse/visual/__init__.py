"""Visual pipeline: decoding, frame sampling, and the 3D convolutional classifier."""

from polyfuse.visual.decode import (
    DecodedVideo,
    decode_video,
    decoder_identity,
    write_mp4_video,
    write_npz_video,
)
from polyfuse.visual.model import (
    VisualModelConfig,
    build_visual_model,
    compute_stack_shapes,
    predict_visual,
    predict_visual_batch,
    train_visual_model,
    visual_penultimate_batch,
)
from polyfuse.visual.sampling import (
    VISUAL_PIPELINE_VERSION,
    FrameTensor,
    sample_frames,
    uniform_timestamps,
)

__all__ = [
    "DecodedVideo",
    "FrameTensor",
    "VISUAL_PIPELINE_VERSION",
    "VisualModelConfig",
    "build_visual_model",
    "compute_stack_shapes",
    "decode_video",
    "decoder_identity",
    "predict_visual",
    "predict_visual_batch",
    "sample_frames",
    "train_visual_model",
    "uniform_timestamps",
    "visual_penultimate_batch",
    "write_mp4_video",
    "write_npz_video",
]
